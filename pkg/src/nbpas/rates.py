"""Achievable rates and finite-length bounds for the real AWGN channel.

All integrals over the channel output are evaluated per transmitted point
with Gauss-Hermite quadrature, ``E[f(Y) | X=x] = sum_i w_i f(x + sigma t_i)``
(nodes rescaled to the standard normal). Input power is normalized to one,
so ``SNR = 1 / sigma^2``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .shaping import AskConstellation, entropy, rescale

GH_NODES = 128
_t, _w = np.polynomial.hermite.hermgauss(GH_NODES)
GH_T = _t * np.sqrt(2.0)
GH_W = _w / np.sqrt(np.pi)
LOG2 = math.log(2.0)


def db_to_lin(snr_db):
    return 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)


def lin_to_db(snr):
    return 10.0 * np.log10(snr)


def cap_awgn(snr: float) -> float:
    """Capacity of the real AWGN channel, ``0.5 log2(1 + snr)``."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    return 0.5 * math.log2(1.0 + snr)


def _prepare(pX, points):
    pX = np.asarray(pX, dtype=float)
    points = np.asarray(points, dtype=float)
    if pX.shape != points.shape:
        raise ValueError("pX and points must have the same length")
    if abs(pX.sum() - 1) > 1e-9 or np.any(pX < 0):
        raise ValueError("pX must be a probability vector")
    keep = pX > 0
    pX, points = pX[keep], points[keep]
    points = points / np.sqrt(np.sum(pX * points**2))
    return pX, points, keep


def _loglik(snr, pX, points):
    """``log(P_X(x') p(y|x'))`` up to a common constant, at the quadrature
    outputs ``y = x + sigma t`` of every transmitted ``x``: shape (X, T, X')."""
    sigma = 1.0 / math.sqrt(snr)
    y = points[:, None] + sigma * GH_T[None, :]
    d = (y[:, :, None] - points[None, None, :]) / sigma
    return -0.5 * d * d + np.log(pX)[None, None, :]


def r_smd(snr: float, pX, points) -> float:
    """Symbol-metric rate ``I(X;Y)`` in bits per channel use.

    ``points`` are rescaled to unit average power under ``pX``.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    pX, points, _ = _prepare(pX, points)
    ll = _loglik(snr, pX, points)
    own = -0.5 * GH_T**2  # log p(y|x) at its own x, same constant
    lpy = logsumexp(ll, axis=-1)
    h_cond = -np.sum(pX[:, None] * GH_W[None, :] * (own[None, :] + np.log(pX)[:, None] - lpy))
    # h_cond is H(X|Y) in nats
    return float(np.clip(entropy(pX) - h_cond / LOG2, 0.0, entropy(pX)))


def r_bmd(snr: float, pX, points, labels, m: int | None = None) -> float:
    """Bit-metric rate ``[H(B) - sum_i H(B_i|Y)]^+``.

    ``labels[j]`` is the integer label of ``points[j]``, MSB first.
    """
    if snr <= 0:
        raise ValueError("snr must be positive")
    labels = np.asarray(labels)
    if m is None:
        m = int(len(labels)).bit_length() - 1
    if sorted(labels.tolist()) != list(range(1 << m)):
        raise ValueError("labeling must be a bijection onto {0,1}^m")
    pX, points, keep = _prepare(pX, points)
    labels = labels[keep]
    ll = _loglik(snr, pX, points)
    lpy = logsumexp(ll, axis=-1)
    h_bits = 0.0
    for i in range(m):
        bit = (labels >> (m - 1 - i)) & 1
        for b in (0, 1):
            tx = bit == b
            if not tx.any():
                continue
            lpb = logsumexp(ll[tx][:, :, bit == b], axis=-1)
            h_bits -= np.sum(pX[tx][:, None] * GH_W[None, :] * (lpb - lpy[tx]))
    return float(max(entropy(pX) - h_bits / LOG2, 0.0))


def shaped_points(constellation: AskConstellation, pA):
    """``(pX, unit-power points)`` for an amplitude law with uniform signs."""
    pX = constellation.point_distribution(pA)
    return pX, constellation.points * rescale(constellation, pX)


def rate_function(metric: str, constellation: AskConstellation, pX) -> Callable[[float], float]:
    """Rate as a function of linear SNR for ``metric`` in {cap, smd, bmd}."""
    pts = constellation.points
    if metric == "cap":
        return cap_awgn
    if metric == "smd":
        return lambda snr: r_smd(snr, pX, pts)
    if metric == "bmd":
        return lambda snr: r_bmd(snr, pX, pts, constellation.labels, constellation.m)
    raise ValueError(f"unknown metric {metric!r}")


def shannon_limit_snr(
    target_rate: float,
    metric: str = "cap",
    constellation: AskConstellation | None = None,
    pX=None,
    lo_db: float = -20.0,
    hi_db: float = 40.0,
) -> float:
    """SNR in dB at which ``metric`` reaches ``target_rate`` (Brent root finding)."""
    if metric == "cap":
        return float(lin_to_db(2.0 ** (2 * target_rate) - 1))
    if constellation is None or pX is None:
        raise ValueError("smd/bmd limits need a constellation and pX")
    f = rate_function(metric, constellation, pX)
    flo, fhi = f(db_to_lin(lo_db)), f(db_to_lin(hi_db))
    if not flo <= target_rate <= fhi:
        raise ValueError(
            f"target {target_rate} not bracketed by [{flo:.6f}, {fhi:.6f}] on [{lo_db}, {hi_db}] dB"
        )
    return float(brentq(lambda d: f(db_to_lin(d)) - target_rate, lo_db, hi_db, xtol=1e-9))


def gallager_e0(rho: float, snr: float, pX, points) -> float:
    """``E_0(rho) = -log2 int (sum_x P(x) p(y|x)^(1/(1+rho)))^(1+rho) dy``."""
    pX, points, _ = _prepare(pX, points)
    ll = _loglik(snr, pX, points)
    s = 1.0 / (1.0 + rho)
    logp = np.log(pX)[None, None, :]
    # integrand / p(y), averaged over Y ~ p(y) = sum_x P(x) p(y|x)
    lg = (1.0 + rho) * logsumexp(s * (ll - logp) + logp, axis=-1)
    lpy = logsumexp(ll, axis=-1)
    ratio = logsumexp(lg - lpy + np.log(GH_W)[None, :] + np.log(pX)[:, None])
    return float(-ratio / LOG2)


def _golden_max(f, a: float, b: float, tol: float) -> float:
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def gallager_exponent(rt: float, snr: float, pX, points, tol: float = 1e-6) -> tuple[float, float]:
    """Random-coding exponent ``max_{rho in [0,1]} E_0(rho) - rho rt``.

    Returns ``(exponent, rho)``; the exponent is in bits.
    """
    f = lambda r: gallager_e0(r, snr, pX, points) - r * rt
    rho = _golden_max(f, 0.0, 1.0, tol)
    best = (f(rho), rho)
    # the optimum may sit on the boundary
    for edge in (0.0, 1.0):
        val = f(edge)
        if val > best[0]:
            best = (val, edge)
    return (best[0] if best[0] > 0 else 0.0), best[1]


def gallager_rcb(n: int, rt: float, snr: float, pX, points) -> float:
    """Random coding bound ``2^(-n E_G)`` on the average frame error rate."""
    if n < 1 or rt <= 0:
        raise ValueError("need n >= 1 and rt > 0")
    e, _ = gallager_exponent(rt, snr, pX, points)
    return float(min(1.0, 2.0 ** (-n * e)))
