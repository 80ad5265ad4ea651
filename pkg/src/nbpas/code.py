"""Ultra-sparse (d_v = 2) non-binary LDPC codes.

Codes are lifted from the single-row protograph ``[2 2 ... 2]``: every
protograph entry becomes the sum of two ``N x N`` circulant permutation
matrices, so each block column holds ``N`` weight-2 columns and every row
has weight ``d_c``. Shifts are picked greedily to maximize girth, then edge
labels are drawn at random and repaired until no shortest cycle has an
alternating label product equal to one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gf import Field


@dataclass
class LabeledParityCheck:
    """Sparse parity-check matrix over GF(q).

    ``rows[j]`` is a list of ``(column, label)`` pairs with nonzero labels,
    sorted by column. ``lifting`` optionally records the lifting size and
    the per-block shift pairs the matrix was built from (column order may
    differ from the raw lifted order after :func:`build_code` reorders
    columns for systematic encoding).
    """

    field: Field
    n_c: int
    rows: list[list[tuple[int, int]]]
    lifting: tuple[int, tuple[tuple[int, int], ...]] | None = None
    _edges: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        rows = []
        for j, row in enumerate(self.rows):
            row = sorted((int(c), int(h)) for c, h in row)
            cols = [c for c, _ in row]
            if len(set(cols)) != len(cols):
                raise ValueError(f"row {j} repeats a column")
            for c, h in row:
                if not 0 <= c < self.n_c:
                    raise ValueError(f"row {j}: column {c} out of range")
                if not 0 < h < self.field.q:
                    raise ValueError(f"row {j}: label {h} not a nonzero element of GF({self.field.q})")
            rows.append(row)
        self.rows = rows

    @property
    def m_c(self) -> int:
        return len(self.rows)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n_edges(self) -> int:
        return sum(len(r) for r in self.rows)

    def row_degrees(self) -> np.ndarray:
        return np.array([len(r) for r in self.rows])

    def col_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_c, dtype=int)
        for row in self.rows:
            for c, _ in row:
                deg[c] += 1
        return deg

    @property
    def d_v(self) -> int:
        deg = set(self.col_degrees().tolist())
        return deg.pop() if len(deg) == 1 else 0

    @property
    def d_c(self) -> int:
        deg = set(self.row_degrees().tolist())
        return deg.pop() if len(deg) == 1 else 0

    @property
    def design_rate(self) -> Fraction:
        return 1 - Fraction(self.m_c, self.n_c)

    def dense(self) -> np.ndarray:
        H = np.zeros((self.m_c, self.n_c), dtype=np.int64)
        for j, row in enumerate(self.rows):
            for c, h in row:
                H[j, c] = h
        return H

    @classmethod
    def from_dense(cls, H, field: Field) -> "LabeledParityCheck":
        H = np.asarray(H)
        rows = [[(int(c), int(H[j, c])) for c in np.nonzero(H[j])[0]] for j in range(H.shape[0])]
        return cls(field, H.shape[1], rows)

    def edges(self):
        """Edge arrays ``(check, variable, label)`` ordered by check."""
        if self._edges is None:
            chk, var, lab = [], [], []
            for j, row in enumerate(self.rows):
                for c, h in row:
                    chk.append(j)
                    var.append(c)
                    lab.append(h)
            self._edges = tuple(np.array(a, dtype=np.int64) for a in (chk, var, lab))
        return self._edges

    def permute_columns(self, order: Sequence[int]) -> "LabeledParityCheck":
        """New matrix whose column ``i`` is this matrix's column ``order[i]``."""
        order = list(order)
        if sorted(order) != list(range(self.n_c)):
            raise ValueError("order must be a permutation of the columns")
        pos = {old: new for new, old in enumerate(order)}
        rows = [[(pos[c], h) for c, h in row] for row in self.rows]
        return LabeledParityCheck(self.field, self.n_c, rows, self.lifting)


def syndrome(H: LabeledParityCheck, c) -> np.ndarray:
    """``c H^T`` over GF(q)."""
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (H.n_c,):
        raise ValueError(f"expected {H.n_c} symbols, got shape {c.shape}")
    chk, var, lab = H.edges()
    prods = H.field.mul_table[lab, c[var]]
    out = np.zeros(H.m_c, dtype=np.int64)
    np.bitwise_xor.at(out, chk, prods)
    return out


# --- girth ---------------------------------------------------------------


def _tanner_adjacency(H: LabeledParityCheck) -> list[list[int]]:
    # nodes 0..n_c-1 are variables, n_c.. are checks
    adj: list[list[int]] = [[] for _ in range(H.n_c + H.m_c)]
    for j, row in enumerate(H.rows):
        for c, _ in row:
            adj[c].append(H.n_c + j)
            adj[H.n_c + j].append(c)
    return adj


def _shortest_cycle_through(adj, root: int, best: int) -> int:
    """Length of the shortest closed walk found by BFS from ``root``.

    Minimizing over all roots yields the girth.
    """
    dist = {root: 0}
    parent = {root: -1}
    queue = deque([root])
    found = best
    while queue:
        u = queue.popleft()
        if 2 * dist[u] >= found:
            break
        for v in adj[u]:
            if v == parent[u]:
                parent[u] = -2  # a second parallel edge closes a 2-cycle
                continue
            if v not in dist:
                dist[v] = dist[u] + 1
                parent[v] = u
                queue.append(v)
            else:
                found = min(found, dist[u] + dist[v] + 1)
    return found


def girth(H: LabeledParityCheck) -> int:
    """Length of the shortest cycle of the Tanner graph; 0 for a forest."""
    adj = _tanner_adjacency(H)
    best = 1 << 30
    for root in range(H.n_c + H.m_c):
        best = _shortest_cycle_through(adj, root, best)
    return 0 if best == 1 << 30 else best


def _circulant_check_graph(N: int, shifts) -> list[list[int]]:
    # variables are edges (r, r + d) of a circulant graph on the checks
    adj: list[list[int]] = [[] for _ in range(N)]
    for s1, s2 in shifts:
        for i in range(N):
            a, b = (i + s1) % N, (i + s2) % N
            adj[a].append(b)
            adj[b].append(a)
    return adj


def _lifted_girth(N: int, shifts) -> int:
    """Tanner girth of the lifted graph via its vertex-transitive check graph."""
    if not shifts:
        return 0
    adj = _circulant_check_graph(N, shifts)
    for s1, s2 in shifts:
        if s1 % N == s2 % N:
            return 2  # a self-loop would be a double edge in H
    # parallel edges in the check graph are 4-cycles in the Tanner graph
    g = _shortest_cycle_through_multigraph(adj, 0)
    return 0 if g == 0 else 2 * g


def _shortest_cycle_through_multigraph(adj, root: int) -> int:
    # count parallel edges explicitly: 2-cycles
    for u, nbrs in enumerate(adj):
        if len(nbrs) != len(set(nbrs)):
            return 2
    g = _shortest_cycle_through(adj, root, 1 << 30)
    return 0 if g == 1 << 30 else g


def lift(N: int, shifts, field: Field, labels=None) -> LabeledParityCheck:
    """Lift ``[2 ... 2]`` with ``shifts[b] = (s1, s2)`` for block column ``b``.

    Column ``b N + i`` has ones in rows ``(i + s1) mod N`` and ``(i + s2) mod N``.
    """
    rows: list[list[tuple[int, int]]] = [[] for _ in range(N)]
    for b, (s1, s2) in enumerate(shifts):
        for i in range(N):
            col = b * N + i
            for s in (s1, s2):
                rows[(i + s) % N].append((col, 1))
    H = LabeledParityCheck(field, N * len(shifts), rows, (N, tuple(tuple(s) for s in shifts)))
    if labels is not None:
        H = with_labels(H, labels)
    return H


def with_labels(H: LabeledParityCheck, labels) -> LabeledParityCheck:
    """Copy of ``H`` with edge labels replaced (edges in :meth:`edges` order)."""
    labels = list(labels)
    if len(labels) != H.n_edges:
        raise ValueError("one label per edge required")
    it = iter(labels)
    rows = [[(c, int(next(it))) for c, _ in row] for row in H.rows]
    return LabeledParityCheck(H.field, H.n_c, rows, H.lifting)


def peg_shifts(N: int, n_blocks: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Greedy shift selection: each block's second shift maximizes the girth
    of the graph built so far (smallest shift on ties)."""
    shifts: list[tuple[int, int]] = []
    for _ in range(n_blocks):
        s1 = int(rng.integers(N))
        best, best_s = -1, None
        for s2 in range(N):
            if s2 == s1:
                continue
            g = _lifted_girth(N, shifts + [(s1, s2)])
            score = 1 << 30 if g == 0 else g
            if score > best:
                best, best_s = score, s2
        shifts.append((s1, best_s))
    return shifts


# --- cycles and labels ----------------------------------------------------


def shortest_cycles(H: LabeledParityCheck, length: int | None = None) -> list[list[int]]:
    """All cycles of the given Tanner length (default: the girth).

    Each cycle is an edge-index list ``[e0, e1, ..., e_{2k-1}]`` (indices into
    :meth:`LabeledParityCheck.edges`) walking check -> variable -> check; the
    pairs ``(e_{2i}, e_{2i+1})`` share a variable.
    """
    if length is None:
        length = girth(H)
    if length == 0:
        return []
    k = length // 2
    chk, var, _ = H.edges()
    var_edges: list[list[int]] = [[] for _ in range(H.n_c)]
    for e, v in enumerate(var):
        var_edges[v].append(e)
    chk_edges: list[list[int]] = [[] for _ in range(H.m_c)]
    for e, j in enumerate(chk):
        chk_edges[j].append(e)

    seen = set()
    cycles = []

    def walk(start_chk, cur_chk, path, used_v, used_c):
        if len(path) == 2 * k:
            if cur_chk == start_chk:
                key = frozenset(path)
                if key not in seen:
                    seen.add(key)
                    cycles.append(list(path))
            return
        for e_in in chk_edges[cur_chk]:
            v = int(var[e_in])
            if v in used_v:
                continue
            for e_out in var_edges[v]:
                if e_out == e_in:
                    continue
                nxt = int(chk[e_out])
                closing = len(path) + 2 == 2 * k
                if closing and nxt != start_chk:
                    continue
                if not closing and (nxt in used_c or nxt < start_chk):
                    continue
                walk(start_chk, nxt, path + [e_in, e_out], used_v | {v}, used_c | {nxt})

    for j in range(H.m_c):
        walk(j, j, [], frozenset(), frozenset({j}))
    return cycles


def cycle_cancels(field: Field, labels: Sequence[int]) -> bool:
    """True when the alternating label product of a cycle equals one.

    ``labels`` are ordered along the cycle with consecutive pairs sharing a
    variable: the product is ``prod labels[0::2] / prod labels[1::2]``.
    """
    num, den = 1, 1
    for h in labels[0::2]:
        num = field.mul(num, h)
    for h in labels[1::2]:
        den = field.mul(den, h)
    return num == den


def _cancelling(field: Field, cycles: np.ndarray, labels: np.ndarray) -> np.ndarray:
    # alternating product == 1  <=>  sum of logs (with signs) == 0 mod q - 1
    logs = field.log_table[labels[cycles]]
    return (logs[:, 0::2].sum(axis=1) - logs[:, 1::2].sum(axis=1)) % (field.q - 1) == 0


def assign_labels(
    H: LabeledParityCheck, field: Field, seed: int = 0, max_retries: int = 10000
) -> LabeledParityCheck:
    """Random nonzero labels, then repair every cancelling shortest cycle.

    Repair is a min-conflicts search: an edge of a cancelling cycle gets the
    label that leaves the fewest cancelling cycles through that edge (random
    choice among the best).
    """
    rng = np.random.default_rng(seed)
    if field.q == 2:
        return with_labels(H, [1] * H.n_edges)
    H = LabeledParityCheck(field, H.n_c, [list(r) for r in H.rows], H.lifting)
    labels = rng.integers(1, field.q, size=H.n_edges)
    cycles = np.array(shortest_cycles(H), dtype=np.int64).reshape(-1, max(girth(H), 2))
    if len(cycles) == 0:
        return with_labels(H, labels)
    through: list[list[int]] = [[] for _ in range(H.n_edges)]
    for ci, cyc in enumerate(cycles):
        for e in cyc:
            through[e].append(ci)
    through_arr = [np.array(t, dtype=np.int64) for t in through]
    candidates = np.arange(1, field.q)
    for _ in range(max_retries):
        bad = np.nonzero(_cancelling(field, cycles, labels))[0]
        if len(bad) == 0:
            return with_labels(H, labels)
        cyc = cycles[bad[rng.integers(len(bad))]]
        e = int(cyc[rng.integers(len(cyc))])
        sub = cycles[through_arr[e]]
        trial = labels.copy()
        conflicts = np.empty(len(candidates), dtype=np.int64)
        for i, h in enumerate(candidates):
            trial[e] = h
            conflicts[i] = np.count_nonzero(_cancelling(field, sub, trial))
        best = np.nonzero(conflicts == conflicts.min())[0]
        labels[e] = candidates[best[rng.integers(len(best))]]
    raise RuntimeError("label repair did not converge; try another seed")


# --- systematic encoding --------------------------------------------------


@dataclass(frozen=True)
class SystematicEncoder:
    """``perm[:k]`` are the information columns of ``H``, ``perm[k:]`` the
    parity columns; parity symbols are ``u P`` with ``P`` of shape (k, m_c)."""

    field: Field
    perm: np.ndarray
    P: np.ndarray

    @property
    def k(self) -> int:
        return self.P.shape[0]

    @property
    def n_c(self) -> int:
        return self.P.shape[0] + self.P.shape[1]


def _gf_matmul(field: Field, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    prods = field.mul_table[A[:, :, None], B[None, :, :]]
    return np.bitwise_xor.reduce(prods, axis=1)


def systematic_form(H: LabeledParityCheck) -> SystematicEncoder:
    """Gaussian elimination over GF(q), pivoting on the rightmost columns.

    Columns are searched from the right so that, whenever possible, the
    last ``m_c`` columns carry parity and ``perm`` is the identity.
    """
    F = H.field
    A = H.dense().copy()
    m, n = A.shape
    mul, inv = F.mul_table, F.inv_table
    found = []  # pivot column of each reduced row
    r = 0
    for col in range(n - 1, -1, -1):
        if r == m:
            break
        nz = np.nonzero(A[r:, col])[0]
        if len(nz) == 0:
            continue
        p = r + nz[0]
        A[[r, p]] = A[[p, r]]
        A[r] = mul[inv[A[r, col]], A[r]]
        for i in range(m):
            if i != r and A[i, col]:
                A[i] ^= mul[A[i, col], A[r]]
        found.append(col)
        r += 1
    if r < m:
        raise ValueError(f"parity-check matrix is rank deficient: rank {r} < {m}")
    row_of = {col: i for i, col in enumerate(found)}
    pivots = sorted(found)
    info = [c for c in range(n) if c not in row_of]
    perm = np.array(info + pivots, dtype=np.int64)
    # parity column `pc` equals sum over info columns of A[row_of[pc], ic] u_ic
    P = np.zeros((len(info), m), dtype=np.int64)
    for j, pc in enumerate(pivots):
        P[:, j] = A[row_of[pc], info]
    return SystematicEncoder(F, perm, P)


def encode(u, enc: SystematicEncoder) -> np.ndarray:
    """Codeword in ``H`` column order with ``c[perm[:k]] = u``."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (enc.k,):
        raise ValueError(f"expected {enc.k} information symbols, got shape {u.shape}")
    p = np.bitwise_xor.reduce(enc.field.mul_table[u[:, None], enc.P], axis=0) if enc.k else np.zeros(enc.P.shape[1], dtype=np.int64)
    c = np.empty(enc.n_c, dtype=np.int64)
    c[enc.perm[: enc.k]] = u
    c[enc.perm[enc.k :]] = p
    return c


def encode_many(U, enc: SystematicEncoder) -> np.ndarray:
    """Row-wise :func:`encode` for a batch of information words."""
    U = np.asarray(U, dtype=np.int64)
    par = _gf_matmul(enc.field, U, enc.P)
    C = np.empty((U.shape[0], enc.n_c), dtype=np.int64)
    C[:, enc.perm[: enc.k]] = U
    C[:, enc.perm[enc.k :]] = par
    return C


# --- construction ---------------------------------------------------------


@dataclass(frozen=True)
class Protograph:
    entries: tuple[int, ...]

    def __post_init__(self):
        if any(e != 2 for e in self.entries) or not self.entries:
            raise ValueError("ultra-sparse protographs are rows of 2s")

    @classmethod
    def for_check_degree(cls, d_c: int) -> "Protograph":
        if d_c < 4 or d_c % 2:
            raise ValueError(f"check degree must be even and >= 4, got {d_c}")
        return cls((2,) * (d_c // 2))

    @property
    def d_c(self) -> int:
        return sum(self.entries)


def _structure_score(N, shifts):
    H = lift(N, shifts, Field(1))
    g = _lifted_girth(N, shifts)
    return g, len(shortest_cycles(H, g)) if g else 0


def build_code(
    d_c: int,
    N: int,
    field: Field,
    seed: int = 0,
    restarts: int = 50,
) -> LabeledParityCheck:
    """Lift ``[2 ... 2]`` by ``N``, label the edges, and order the columns so
    that the last ``m_c`` columns are parity (systematic ``perm`` = identity).

    Up to ``restarts`` shift searches run (seeded from ``seed``); the best
    graph wins by girth, then by fewest shortest cycles.
    """
    proto = Protograph.for_check_degree(d_c)
    n_blocks = len(proto.entries)
    if N < 3:
        raise ValueError("lifting size must be at least 3")
    ss = np.random.SeedSequence(seed)
    best = None
    for child in ss.spawn(restarts):
        rng = np.random.default_rng(child)
        shifts = peg_shifts(N, n_blocks, rng)
        g, count = _structure_score(N, shifts)
        key = (g if g else 1 << 30, -count)
        if best is None or key > best[0]:
            best = (key, shifts)
    shifts = best[1]
    H = lift(N, shifts, field)
    H = assign_labels(H, field, seed)
    enc = systematic_form(H)
    H = H.permute_columns(enc.perm)
    return H
