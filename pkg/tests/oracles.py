"""Independent reference computations shared by the unit and acceptance
tests. Nothing here uses the package's fast paths."""

import itertools
import math

import numpy as np
from scipy.stats import norm

from nbpas.code import LabeledParityCheck
from nbpas.gf import field_new
from nbpas.pas import beta_a, beta_s
from nbpas.shaping import AskConstellation


def poly_mulmod(a, b, poly, p):
    """Carry-less multiply then reduce: independent of the tables."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> p & 1:
            a ^= poly
    return r


def field_axiom_failures(F, samples=20000, seed=0):
    """Names of the field axioms that fail; exhaustive up to q = 64,
    sampled triples above."""
    M = F.mul_table
    a = np.arange(F.q)
    bad = []
    oracle = np.array([[poly_mulmod(int(x), int(y), F.primitive_poly, F.p) for y in a] for x in a])
    if not np.array_equal(M, oracle):
        bad.append("tables")
    if any(F.add(x, int(y)) != x ^ int(y) for x in range(F.q) for y in a):
        bad.append("addition")
    if not np.array_equal(M, M.T):
        bad.append("commutativity")
    if not (np.array_equal(M[1], a) and not M[0].any()):
        bad.append("identity")
    if F.q > 64:
        x, y, z = np.random.default_rng(seed).integers(0, F.q, size=(samples, 3)).T
    else:
        x, y, z = np.array(list(itertools.product(a, a, a))).T
    if not np.array_equal(M[x, y ^ z], M[x, y] ^ M[x, z]):
        bad.append("distributivity")
    if not np.array_equal(M[M[x, y], z], M[x, M[y, z]]):
        bad.append("associativity")
    for v in range(1, F.q):
        if np.count_nonzero(M[v] == 1) != 1 or M[v, F.inv(v)] != 1:
            bad.append("inverses")
            break
    return bad


def direct_xor_conv(a, b):
    q = len(a)
    out = np.zeros(q)
    for x in range(q):
        for y in range(q):
            out[x ^ y] += a[x] * b[y]
    return out


def multinomial_oracle(comp):
    out = math.factorial(sum(comp))
    for c in comp:
        out //= math.factorial(c)
    return out


def random_tree_code(rng):
    """Random tree-structured code: each new check joins one existing
    variable with one or two fresh ones. q^n_c stays below 2^15 so the
    brute-force oracle is cheap."""
    p = int(rng.choice([1, 2, 3]))
    F = field_new(p)
    max_n = min(8, 15 // p)
    rows = []
    n = 1
    while n < max_n:
        fresh = int(rng.integers(1, min(2, max_n - n) + 1))
        old = int(rng.integers(0, n))
        cols = [old] + list(range(n, n + fresh))
        rows.append([(c, int(rng.integers(1, F.q))) for c in cols])
        n += fresh
        if rng.random() < 0.2:
            break
    return LabeledParityCheck(F, n, rows)


def random_loopy_code(rng):
    F = field_new(int(rng.choice([2, 3])))
    n = int(rng.integers(4, 9))
    m = int(rng.integers(2, n))
    rows = []
    for _ in range(m):
        cols = rng.choice(n, size=int(rng.integers(2, min(n, 4) + 1)), replace=False)
        rows.append([(int(c), int(rng.integers(1, F.q))) for c in cols])
    return LabeledParityCheck(F, n, rows)


def brute_marginals(H, priors):
    """Posterior marginals by enumerating every word of F_q^n_c."""
    q, n = H.q, H.n_c
    C = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    ok = np.ones(len(C), dtype=bool)
    for row in H.rows:
        s = np.zeros(len(C), dtype=np.int64)
        for c, h in row:
            s ^= H.field.mul_table[h, C[:, c]]
        ok &= s == 0
    C = C[ok]
    w = np.prod(priors[np.arange(n), C], axis=1)
    marg = np.zeros((n, q))
    for i in range(n):
        marg[i] = np.bincount(C[:, i], weights=w, minlength=q)
    return marg / marg.sum(axis=1, keepdims=True)


def joint_oracle(y, pA, m, snr, kind):
    """Symbol posteriors by exhaustive marginalization over all point
    tuples of the window."""
    c = AskConstellation(m)
    pts = c.points
    pX = c.point_distribution(pA)
    delta = 1 / math.sqrt(np.sum(pX * pts**2))
    L = len(y)
    sigma = 1 / math.sqrt(snr)
    idx = np.array(list(itertools.product(range(len(pts)), repeat=L)))
    x = delta * pts[idx]
    w = np.prod(pX[idx] * norm.pdf(y[None, :], loc=x, scale=sigma), axis=1)
    if kind == "amp":
        a = np.abs(pts[idx]).astype(int)
        keys = np.array([beta_a(t, m) for t in a])
        q = 1 << ((m - 1) * L)
    else:
        keys = np.array([beta_s(t) for t in np.sign(pts[idx])])
        q = 1 << L
    out = np.bincount(keys, weights=w, minlength=q)
    return out / out.sum()


PA8 = np.array([0.45, 0.3, 0.17, 0.08])
