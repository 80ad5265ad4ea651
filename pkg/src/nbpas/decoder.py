"""Probability-domain q-ary belief propagation for labeled parity checks.

Check nodes work in the Walsh-Hadamard domain: an incoming message on an
edge with label ``h`` is first turned into the distribution of ``h c``,
the XOR-convolution of all other edges is a pointwise product of
transforms, and the outgoing message is mapped back through ``h``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .code import LabeledParityCheck, syndrome

FLOOR = 1e-30
MAX_ITER = 200

__all__ = ["DecodeResult", "TannerGraph", "decode", "syndrome", "wht", "xor_convolve"]


def wht(v) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    Applying it twice multiplies by ``q``.
    """
    v = np.array(v, dtype=float)
    q = v.shape[-1]
    if q < 1 or q & (q - 1):
        raise ValueError(f"length must be a power of two, got {q}")
    flat = np.ascontiguousarray(v.reshape(-1, q))
    kernels.wht_rows(flat)
    return flat.reshape(v.shape)


def xor_convolve(a, b) -> np.ndarray:
    """``(a * b)(z) = sum_x a(x) b(x ^ z)`` computed through the transform."""
    a = np.asarray(a, dtype=float)
    q = a.shape[-1]
    return wht(wht(a) * wht(b)) / q


@dataclass
class DecodeResult:
    codeword: np.ndarray
    converged: bool
    iterations: int
    posterior: np.ndarray


class TannerGraph:
    """Flat edge arrays of ``H`` in the layout the kernels expect.

    Edges are numbered in check order; ``var_edge[var_ptr[v]:var_ptr[v+1]]``
    lists the edges of variable ``v``.
    """

    def __init__(self, H: LabeledParityCheck):
        self.H = H
        chk, var, lab = H.edges()
        self.q = H.q
        self.n = H.n_c
        self.m = H.m_c
        self.edge_var = np.ascontiguousarray(var, dtype=np.int64)
        self.edge_lab = np.ascontiguousarray(lab, dtype=np.int64)
        self.chk_ptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(np.bincount(chk, minlength=self.m), out=self.chk_ptr[1:])
        order = np.argsort(var, kind="stable")
        self.var_edge = order.astype(np.int64)
        self.var_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(var, minlength=self.n), out=self.var_ptr[1:])
        self.mul = np.ascontiguousarray(H.field.mul_table)
        self.inv = np.ascontiguousarray(H.field.inv_table)


def decode(
    H, priors, max_iter: int = MAX_ITER, floor: float = FLOOR, early_stop: bool = True
) -> DecodeResult:
    """Flooding sum-product decoding with syndrome-based stopping.

    Parameters
    ----------
    H : LabeledParityCheck or TannerGraph
        Code; pass a prebuilt :class:`TannerGraph` to reuse it across frames.
    priors : (n_c, q) array
        Per-symbol channel probabilities, rows indexed by field element.
    max_iter : int
        Iteration cap.
    early_stop : bool
        Stop as soon as the hard decision satisfies every check. When false
        exactly ``max_iter`` iterations run (used to read out beliefs).

    Returns
    -------
    DecodeResult
        ``iterations`` is 0 when the channel hard decision already satisfies
        every check.
    """
    g = H if isinstance(H, TannerGraph) else TannerGraph(H)
    priors = np.ascontiguousarray(priors, dtype=float)
    if priors.shape != (g.n, g.q):
        raise ValueError(f"priors must have shape {(g.n, g.q)}, got {priors.shape}")
    if np.any(priors < 0):
        raise ValueError("priors must be nonnegative")
    s = priors.sum(axis=1, keepdims=True)
    if np.any(s <= 0):
        raise ValueError("every prior needs positive mass")
    priors = priors / s
    hard, iters, ok, post = kernels.bp_decode(
        priors, g.chk_ptr, g.edge_var, g.edge_lab, g.var_ptr, g.var_edge,
        g.mul, g.inv, int(max_iter), float(floor), bool(early_stop),
    )
    return DecodeResult(np.asarray(hard), bool(ok), int(iters), np.asarray(post))
