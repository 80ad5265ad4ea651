import itertools
from fractions import Fraction

import numpy as np
import pytest

from nbpas.code import (
    LabeledParityCheck,
    Protograph,
    assign_labels,
    build_code,
    cycle_cancels,
    encode,
    encode_many,
    girth,
    lift,
    shortest_cycles,
    syndrome,
    systematic_form,
)
from nbpas.gf import field_new

GF4 = field_new(2)


def test_parity_check_validation():
    with pytest.raises(ValueError):
        LabeledParityCheck(GF4, 3, [[(0, 1), (0, 2)]])
    with pytest.raises(ValueError):
        LabeledParityCheck(GF4, 3, [[(0, 1), (3, 2)]])
    with pytest.raises(ValueError):
        LabeledParityCheck(GF4, 3, [[(0, 0), (1, 2)]])
    H = LabeledParityCheck(GF4, 4, [[(0, 1), (1, 2)], [(1, 3), (2, 1), (3, 1)]])
    assert H.m_c == 2 and H.n_edges == 5 and H.d_c == 0
    assert np.array_equal(LabeledParityCheck.from_dense(H.dense(), GF4).dense(), H.dense())


def test_girth_small_cases():
    assert girth(LabeledParityCheck(GF4, 1, [[(0, 1)], [(0, 1)]])) == 0
    assert girth(LabeledParityCheck.from_dense(np.ones((2, 2), int), GF4)) == 4
    # 6-cycle: three checks in a ring
    H = LabeledParityCheck.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]], GF4)
    assert girth(H) == 6


def brute_girth(H):
    """Shortest cycle by trying to delete each edge and BFS between its ends."""
    n = H.n_c
    adj = {}
    for j, row in enumerate(H.rows):
        for c, _ in row:
            adj.setdefault(("v", c), set()).add(("c", j))
            adj.setdefault(("c", j), set()).add(("v", c))
    best = 0
    for j, row in enumerate(H.rows):
        for c, _ in row:
            a, b = ("c", j), ("v", c)
            dist = {a: 0}
            frontier = [a]
            while frontier:
                nxt = []
                for u in frontier:
                    for w in adj[u]:
                        if {u, w} == {a, b} or w in dist:
                            continue
                        dist[w] = dist[u] + 1
                        nxt.append(w)
                frontier = nxt
            if b in dist:
                L = dist[b] + 1
                best = L if best == 0 else min(best, L)
    return best


@pytest.mark.parametrize("N,shifts", [(7, [(0, 1), (0, 3)]), (9, [(0, 2), (1, 5), (0, 4)]), (5, [(0, 1), (0, 2)])])
def test_girth_matches_edge_deletion_oracle(N, shifts):
    H = lift(N, shifts, GF4)
    assert girth(H) == brute_girth(H)


def test_lift_structure():
    H = lift(6, [(0, 1), (2, 5)], GF4)
    assert H.n_c == 12 and H.m_c == 6
    assert set(H.col_degrees()) == {2} and set(H.row_degrees()) == {4}


def test_protograph_rules():
    assert Protograph.for_check_degree(8).d_c == 8
    with pytest.raises(ValueError):
        Protograph.for_check_degree(7)
    with pytest.raises(ValueError):
        Protograph((2, 3))


def test_cycle_condition():
    F = field_new(6)
    h1, h2 = 5, 9
    h3 = F.mul(F.mul(h2, 17), F.inv(h1))
    # product of odd positions equals product of even positions -> cancels
    assert cycle_cancels(F, [h1, h2, h3, 17])
    assert not cycle_cancels(F, [h1, h2, h3, 18])


def test_binary_labels_are_one():
    H = lift(8, [(0, 1), (0, 3)], field_new(1))
    H = assign_labels(H, field_new(1), seed=0)
    assert all(h == 1 for row in H.rows for _, h in row)


def test_systematic_identity_block():
    # H = [P | I] with parity columns last: perm must be the identity
    P = np.array([[1, 2], [3, 1]])
    H = LabeledParityCheck.from_dense(np.hstack([P, np.eye(2, dtype=int)]), GF4)
    enc = systematic_form(H)
    assert np.array_equal(enc.perm, np.arange(4))
    assert np.array_equal(enc.P, P.T)
    assert not encode(np.zeros(2, int), enc).any()


def test_gf4_exhaustive_syndrome():
    rng = np.random.default_rng(3)
    while True:
        A = rng.integers(0, 4, size=(4, 8))
        try:
            enc = systematic_form(LabeledParityCheck.from_dense(A, GF4))
            break
        except ValueError:
            continue
    H = LabeledParityCheck.from_dense(A, GF4)
    words = set()
    for u in itertools.product(range(4), repeat=4):
        c = encode(np.array(u), enc)
        assert not syndrome(H, c).any()
        words.add(tuple(c))
    assert len(words) == 4**4
    # every codeword found by brute force is produced by the encoder
    for c in itertools.product(range(4), repeat=8):
        if not syndrome(H, np.array(c)).any():
            assert c in words


def test_rank_deficient_rejected():
    A = np.array([[1, 1, 0], [2, 2, 0]])
    with pytest.raises(ValueError):
        systematic_form(LabeledParityCheck.from_dense(A, GF4))


@pytest.mark.parametrize("d_c,N,p,min_girth", [(8, 24, 6, 8), (8, 24, 8, 8), (12, 28, 6, 8), (8, 18, 8, 8), (4, 48, 6, 8)])
def test_build_code_configurations(d_c, N, p, min_girth):
    F = field_new(p)
    H = build_code(d_c, N, F, seed=0)
    assert H.n_c == N * d_c // 2 and H.m_c == N
    assert set(H.col_degrees()) == {2} and set(H.row_degrees()) == {d_c}
    assert H.design_rate == 1 - Fraction(2, d_c)
    assert girth(H) >= min_girth
    enc = systematic_form(H)
    assert np.array_equal(enc.perm, np.arange(H.n_c))
    assert enc.k == H.n_c - H.m_c
    rng = np.random.default_rng(0)
    U = rng.integers(0, F.q, size=(10_000, enc.k))
    C = encode_many(U, enc)
    chk, var, lab = H.edges()
    S = np.zeros((len(U), H.m_c), dtype=np.int64)
    prods = F.mul_table[lab[None, :], C[:, var]]
    for e in range(len(chk)):
        S[:, chk[e]] ^= prods[:, e]
    assert not S.any()


def test_mode1_no_cancelling_shortest_cycle():
    F = field_new(6)
    H = build_code(8, 24, F, seed=0)
    g = girth(H)
    cyc = shortest_cycles(H, g)
    assert len(cyc) > 0
    _, _, lab = H.edges()
    for c in cyc:
        assert len(c) == g
        assert not cycle_cancels(F, [int(lab[e]) for e in c])


def test_encode_is_linear():
    F = field_new(6)
    H = build_code(8, 24, F, seed=0)
    enc = systematic_form(H)
    rng = np.random.default_rng(1)
    u1, u2 = rng.integers(0, 64, (2, enc.k))
    assert np.array_equal(encode(u1, enc) ^ encode(u2, enc), encode(u1 ^ u2, enc))
    a = 37
    assert np.array_equal(F.mul_table[a, encode(u1, enc)], encode(F.mul_table[a, u1], enc))
    with pytest.raises(ValueError):
        encode(u1[:-1], enc)


def test_build_code_is_deterministic():
    F = field_new(6)
    assert build_code(8, 24, F, seed=5) == build_code(8, 24, F, seed=5)
