"""Pure numpy versions of the compiled kernels in ``_core.pyx``.

The update order (and therefore rounding) follows the compiled code so
both backends give the same results up to a few ulps.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 8192


def wht_rows(a: np.ndarray) -> None:
    """In-place unnormalized Walsh-Hadamard transform of every row of ``a``."""
    R, q = a.shape
    h = 1
    while h < q:
        v = a.reshape(R, q // (2 * h), 2, h)
        x = v[:, :, 0, :].copy()
        y = v[:, :, 1, :]
        v[:, :, 0, :] += y
        v[:, :, 1, :] = x - y
        h *= 2


def _floor_normalize(v, floor):
    np.maximum(v, floor, out=v)
    v /= v.sum(axis=1, keepdims=True)


def _normalize(v):
    s = v.sum(axis=1, keepdims=True)
    np.divide(v, s, out=v, where=s > 0)


def _groups(ptr):
    """Split CSR rows into groups of equal degree: ``[(rows, index_matrix)]``."""
    deg = np.diff(ptr)
    out = []
    for d in np.unique(deg):
        rows = np.flatnonzero(deg == d)
        idx = ptr[rows][:, None] + np.arange(d)[None, :]
        out.append((rows, idx))
    return out


def _syndrome_zero(hard, chk_groups, edge_var, edge_lab, mul):
    for _, idx in chk_groups:
        prod = mul[edge_lab[idx], hard[edge_var[idx]]]
        if np.any(np.bitwise_xor.reduce(prod, axis=1)):
            return False
    return True


def bp_decode(priors, chk_ptr, edge_var, edge_lab, var_ptr, var_edge, mul, inv, max_iter, floor,
              early_stop=True):
    """Flooding q-ary sum-product decoding.

    Returns ``(hard, iterations, converged, posterior)``.
    """
    n, q = priors.shape
    chk_groups = _groups(chk_ptr)
    var_groups = _groups(var_ptr)
    vc = priors[edge_var].copy()
    cv = np.empty_like(vc)
    post = priors.copy()
    hard = np.argmax(priors, axis=1)
    in_perm = mul[inv[edge_lab]]
    out_perm = mul[edge_lab]
    converged = _syndrome_zero(hard, chk_groups, edge_var, edge_lab, mul)
    it = 0
    while (not converged or not early_stop) and it < max_iter:
        it += 1
        F = np.take_along_axis(vc, in_perm, axis=1)
        wht_rows(F)
        for _, idx in chk_groups:
            Fg = F[idx]
            d = idx.shape[1]
            pre = np.ones((len(idx), d + 1, q))
            suf = np.ones((len(idx), d + 1, q))
            for k in range(d):
                pre[:, k + 1] = pre[:, k] * Fg[:, k]
            for k in range(d - 1, -1, -1):
                suf[:, k] = suf[:, k + 1] * Fg[:, k]
            t = (pre[:, :d] * suf[:, 1:]).reshape(-1, q)
            wht_rows(t)
            e = idx.reshape(-1)
            cv[e] = np.take_along_axis(t, out_perm[e], axis=1) / q
        _floor_normalize(cv, floor)
        for rows, idx in var_groups:
            d = idx.shape[1]
            p = priors[rows].copy()
            for a in range(d):
                p *= cv[var_edge[idx[:, a]]]
                _normalize(p)
            post[rows] = p
            for a in range(d):
                e = var_edge[idx[:, a]]
                m = priors[rows].copy()
                for b in range(d):
                    if b == a:
                        continue
                    m *= cv[var_edge[idx[:, b]]]
                    _normalize(m)
                _floor_normalize(m, floor)
                vc[e] = m
        hard = np.argmax(post, axis=1)
        converged = _syndrome_zero(hard, chk_groups, edge_var, edge_lab, mul)
    return hard.astype(np.int64), it, bool(converged), post


def de_step(W, sel, hin, hout, fresh, Tt, mul, floor):
    """One check-then-variable density-evolution update (see ``_core``)."""
    N, K = sel.shape
    q = W.shape[1]
    out = np.empty((N, q))
    for s in range(0, N, _CHUNK):
        sl = slice(s, min(s + _CHUNK, N))
        G = np.ones((sl.stop - s, q))
        for k in range(K):
            G *= np.take_along_axis(W[sel[sl, k]], Tt[hin[sl, k]], axis=1)
        wht_rows(G)
        o = np.take_along_axis(G, mul[hout[sl]], axis=1) / q
        _floor_normalize(o, floor)
        o *= fresh[sl]
        _floor_normalize(o, floor)
        out[sl] = o
    return out
