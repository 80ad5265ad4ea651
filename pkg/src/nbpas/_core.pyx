# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: q-ary belief propagation and density-evolution steps.

Semantics match ``nbpas._fallback`` exactly; see that module for the
reference formulation.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline void _wht(double* v, Py_ssize_t q) noexcept nogil:
    cdef Py_ssize_t h = 1, i, j
    cdef double a, b
    while h < q:
        i = 0
        while i < q:
            for j in range(i, i + h):
                a = v[j]
                b = v[j + h]
                v[j] = a + b
                v[j + h] = a - b
            i += 2 * h
        h *= 2


cdef inline void _floor_normalize(double* v, Py_ssize_t q, double floor) noexcept nogil:
    cdef Py_ssize_t x
    cdef double s = 0.0
    for x in range(q):
        if v[x] < floor:
            v[x] = floor
        s += v[x]
    for x in range(q):
        v[x] /= s


cdef inline void _normalize(double* v, Py_ssize_t q) noexcept nogil:
    cdef Py_ssize_t x
    cdef double s = 0.0
    for x in range(q):
        s += v[x]
    if s > 0:
        for x in range(q):
            v[x] /= s


def wht_rows(double[:, ::1] a):
    """In-place unnormalized Walsh-Hadamard transform of every row."""
    cdef Py_ssize_t r, q = a.shape[1]
    with nogil:
        for r in range(a.shape[0]):
            _wht(&a[r, 0], q)


def bp_decode(
    const double[:, ::1] priors,
    const i64[::1] chk_ptr,
    const i64[::1] edge_var,
    const i64[::1] edge_lab,
    const i64[::1] var_ptr,
    const i64[::1] var_edge,
    const i64[:, ::1] mul,
    const i64[::1] inv,
    Py_ssize_t max_iter,
    double floor,
    bint early_stop=True,
):
    """Flooding q-ary sum-product decoding.

    Returns ``(hard, iterations, converged, posterior)``. With
    ``early_stop`` false exactly ``max_iter`` iterations run.
    """
    cdef Py_ssize_t n = priors.shape[0], q = priors.shape[1]
    cdef Py_ssize_t m = chk_ptr.shape[0] - 1, E = edge_var.shape[0]
    cdef Py_ssize_t dmax = 0, j, k, d, e, e2, x, v, it, a, b, best
    for j in range(m):
        if chk_ptr[j + 1] - chk_ptr[j] > dmax:
            dmax = chk_ptr[j + 1] - chk_ptr[j]

    vc_arr = np.empty((E, q))
    cv_arr = np.empty((E, q))
    F_arr = np.empty((dmax + 1, q))
    pre_arr = np.empty((dmax + 1, q))
    suf_arr = np.empty((dmax + 1, q))
    post_arr = np.empty((n, q))
    hard_arr = np.empty(n, dtype=np.int64)
    cdef double[:, ::1] vc = vc_arr, cv = cv_arr, F = F_arr, pre = pre_arr, suf = suf_arr
    cdef double[:, ::1] post = post_arr
    cdef i64[::1] hard = hard_arr
    cdef double[::1] tmp = np.empty(q)
    cdef double bestval, s
    cdef i64 syn, h, hinv
    cdef bint converged = False
    cdef Py_ssize_t iters = 0

    with nogil:
        for e in range(E):
            v = edge_var[e]
            for x in range(q):
                vc[e, x] = priors[v, x]
        # hard decision on the channel alone
        for v in range(n):
            best = 0
            bestval = priors[v, 0]
            for x in range(1, q):
                if priors[v, x] > bestval:
                    bestval = priors[v, x]
                    best = x
            hard[v] = best
            for x in range(q):
                post[v, x] = priors[v, x]
        converged = True
        for j in range(m):
            syn = 0
            for e in range(chk_ptr[j], chk_ptr[j + 1]):
                syn ^= mul[edge_lab[e], hard[edge_var[e]]]
            if syn != 0:
                converged = False
                break

        it = 0
        while (not converged or not early_stop) and it < max_iter:
            it += 1
            # check nodes
            for j in range(m):
                d = chk_ptr[j + 1] - chk_ptr[j]
                for k in range(d):
                    e = chk_ptr[j] + k
                    hinv = inv[edge_lab[e]]
                    # distribution of h * c: u(z) = m(h^-1 z)
                    for x in range(q):
                        F[k, x] = vc[e, mul[hinv, x]]
                    _wht(&F[k, 0], q)
                for x in range(q):
                    pre[0, x] = 1.0
                    suf[d, x] = 1.0
                for k in range(d):
                    for x in range(q):
                        pre[k + 1, x] = pre[k, x] * F[k, x]
                for k in range(d - 1, -1, -1):
                    for x in range(q):
                        suf[k, x] = suf[k + 1, x] * F[k, x]
                for k in range(d):
                    e = chk_ptr[j] + k
                    h = edge_lab[e]
                    for x in range(q):
                        tmp[x] = pre[k, x] * suf[k + 1, x]
                    _wht(&tmp[0], q)
                    for x in range(q):
                        cv[e, x] = tmp[mul[h, x]] / q
                    _floor_normalize(&cv[e, 0], q, floor)
            # variable nodes
            for v in range(n):
                for x in range(q):
                    post[v, x] = priors[v, x]
                for a in range(var_ptr[v], var_ptr[v + 1]):
                    e = var_edge[a]
                    for x in range(q):
                        post[v, x] *= cv[e, x]
                    _normalize(&post[v, 0], q)
                for a in range(var_ptr[v], var_ptr[v + 1]):
                    e = var_edge[a]
                    for x in range(q):
                        vc[e, x] = priors[v, x]
                    for b in range(var_ptr[v], var_ptr[v + 1]):
                        if b == a:
                            continue
                        e2 = var_edge[b]
                        for x in range(q):
                            vc[e, x] *= cv[e2, x]
                        _normalize(&vc[e, 0], q)
                    _floor_normalize(&vc[e, 0], q, floor)
                best = 0
                bestval = post[v, 0]
                for x in range(1, q):
                    if post[v, x] > bestval:
                        bestval = post[v, x]
                        best = x
                hard[v] = best
            converged = True
            for j in range(m):
                syn = 0
                for e in range(chk_ptr[j], chk_ptr[j + 1]):
                    syn ^= mul[edge_lab[e], hard[edge_var[e]]]
                if syn != 0:
                    converged = False
                    break
        iters = it
    return hard_arr, int(iters), bool(converged), post_arr


def de_step(
    const double[:, ::1] W,
    const i64[:, ::1] sel,
    const i64[:, ::1] hin,
    const i64[::1] hout,
    const double[:, ::1] fresh,
    const i64[:, ::1] Tt,
    const i64[:, ::1] mul,
    double floor,
):
    """One check-then-variable density-evolution update.

    ``W`` holds the Walsh-Hadamard transforms of the current population;
    ``Tt[h, w]`` maps a transform index through multiplication by ``h``.
    Returns the new population of variable-to-check messages.
    """
    cdef Py_ssize_t N = sel.shape[0], K = sel.shape[1], q = W.shape[1]
    cdef Py_ssize_t i, k, x, r
    cdef i64 h
    out_arr = np.empty((N, q))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] G = np.empty(q)
    with nogil:
        for i in range(N):
            for x in range(q):
                G[x] = 1.0
            for k in range(K):
                r = sel[i, k]
                h = hin[i, k]
                for x in range(q):
                    G[x] *= W[r, Tt[h, x]]
            _wht(&G[0], q)
            h = hout[i]
            for x in range(q):
                out[i, x] = G[mul[h, x]] / q
            _floor_normalize(&out[i, 0], q, floor)
            for x in range(q):
                out[i, x] *= fresh[i, x]
            _floor_normalize(&out[i, 0], q, floor)
    return out_arr
