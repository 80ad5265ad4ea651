"""Monte Carlo density evolution for (2, d_c) non-binary ensembles.

Messages are tracked relative to the transmitted symbol: every population
member carries its own random transmitted symbol and is stored XOR-shifted
so that index 0 is the true value (random coset conditioning). This keeps
the analysis valid for the asymmetric shaped channel, where the all-zero
codeword is not representative.

In the shifted domain a check of the coset code behaves like a check of
the original code, so the check update is the usual label-permuted
XOR-convolution with i.i.d. uniform nonzero labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .gf import Field
from .pas import PasConfig, UniformConfig, _joint, amplitude_factors, sign_factors

FLOOR = 1e-30


def node_fractions(config: PasConfig) -> tuple[Fraction, Fraction]:
    """Fractions of amplitude- and sign-mapped variable nodes."""
    n_c = Fraction(config.n * config.m, config.p)
    amp = Fraction(config.n, config.ell) / n_c
    sgn = Fraction(config.n, config.p) / n_c
    return amp, sgn


def transpose_table(field: Field) -> np.ndarray:
    """``T[h, w]``: index with ``WHT(u)(w) = WHT(v)(T[h, w])`` when
    ``u(h x) = v(x)``.

    Multiplication by ``h`` is linear over GF(2); ``T[h]`` applies its
    transpose to ``w``.
    """
    q, p = field.q, field.p
    cols = field.mul_table[:, 1 << np.arange(p)]  # (q, p): h * 2^i
    w = np.arange(q)
    par = np.zeros((q, q), dtype=np.int64)
    for i in range(p):
        bits = w[None, :] & cols[:, i][:, None]
        x = bits.copy()
        s = 1
        while s < q:
            x ^= x >> s
            s <<= 1
        par |= (x & 1) << i
    return np.ascontiguousarray(par)


@dataclass
class EnsembleSpec:
    """A (2, d_c) ensemble over ``field`` driven by a signaling scheme.

    ``config`` is a :class:`PasConfig` (mixture of amplitude and sign
    metric nodes) or a :class:`UniformConfig` (full-symbol metric).
    """

    d_c: int
    field: Field
    config: PasConfig | UniformConfig
    population: int = 100_000
    max_iter: int = 500
    target: float = 1e-5
    stall: int | None = None

    def __post_init__(self):
        if self.population < 1:
            raise ValueError("population must be positive")
        if self.d_c < 2:
            raise ValueError("d_c must be at least 2")
        if self.field.q != self.config.q:
            raise ValueError("field does not match the configuration")

    @property
    def fractions(self) -> tuple[float, float]:
        if isinstance(self.config, UniformConfig):
            return 1.0, 0.0
        a, s = node_fractions(self.config)
        return float(a), float(s)


def _draw(cdf: np.ndarray, size, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF sampling of indices (faster than ``rng.choice`` with ``p``)."""
    return np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), len(cdf) - 1)


def _shifted_joint(lf: np.ndarray, true: np.ndarray) -> np.ndarray:
    """Joint of per-position factors, XOR-shifted so index 0 is ``true``.

    ``true`` has one sub-symbol per position; the shift factorizes, so it
    is applied to the small per-position vectors.
    """
    K = lf.shape[-1]
    idx = np.arange(K) ^ true[..., None]
    return _joint(np.take_along_axis(lf, idx, axis=-1))


def fresh_messages(spec: EnsembleSpec, n: int, snr: float, rng: np.random.Generator) -> np.ndarray:
    """Channel messages for ``n`` fresh variable nodes, shifted so that
    index 0 is the transmitted symbol."""
    cfg = spec.config
    q = spec.field.q
    if isinstance(cfg, UniformConfig):
        L = cfg.uses_per_symbol
        lab = rng.integers(0, 1 << cfg.m, size=(n, L))
        y = cfg.points[lab] + rng.standard_normal((n, L)) / math.sqrt(snr)
        lf = -0.5 * snr * (y[..., None] - cfg.points) ** 2
        return _shifted_joint(lf, lab)

    pA = cfg.pA
    amps = cfg.constellation.amplitudes
    cdf = np.cumsum(pA)
    out = np.empty((n, q))
    is_amp = rng.random(n) < spec.fractions[0]
    na = int(is_amp.sum())
    ns = n - na

    ai = _draw(cdf, (na, cfg.ell), rng)
    s = 1 - 2 * rng.integers(0, 2, size=(na, cfg.ell))
    y = cfg.delta * amps[ai] * s + rng.standard_normal((na, cfg.ell)) / math.sqrt(snr)
    out[is_amp] = _shifted_joint(amplitude_factors(y, pA, cfg.m, snr, cfg.delta), ai)

    ai = _draw(cdf, (ns, cfg.p), rng)
    b = rng.integers(0, 2, size=(ns, cfg.p))
    y = cfg.delta * amps[ai] * (1 - 2 * b) + rng.standard_normal((ns, cfg.p)) / math.sqrt(snr)
    out[~is_amp] = _shifted_joint(sign_factors(y, pA, cfg.m, snr, cfg.delta), b)
    return out


@dataclass
class PointResult:
    snr_db: float
    converged: bool
    iterations: int
    trace: list = field(default_factory=list)


def de_point(spec: EnsembleSpec, snr_db: float, seed: int = 0, verbose: bool = False) -> PointResult:
    """Run density evolution at one SNR.

    Converged when the fraction of population members whose argmax is not
    the true symbol drops below ``spec.target``. With ``spec.stall`` set, a
    point also stops (as non-convergent) once the error fraction has not
    reached a new minimum for that many iterations.
    """
    q = spec.field.q
    N = spec.population
    K = spec.d_c - 1
    snr = 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng([seed, int(round(snr_db * 1000)) & 0xFFFFFFFF])
    Tt = transpose_table(spec.field)
    mul = np.ascontiguousarray(spec.field.mul_table)
    pop = fresh_messages(spec, N, snr, rng)
    trace = []
    best, best_it = 1.0, 0
    for it in range(1, spec.max_iter + 1):
        W = pop.copy()
        kernels.wht_rows(W)
        sel = rng.integers(0, N, size=(N, K))
        hin = rng.integers(1, q, size=(N, K))
        hout = rng.integers(1, q, size=N)
        fr = fresh_messages(spec, N, snr, rng)
        pop = kernels.de_step(W, sel, hin, hout, fr, Tt, mul, FLOOR)
        err = float(np.mean(np.argmax(pop, axis=1) != 0))
        trace.append(err)
        if verbose:
            print(f"{snr_db:.3f} dB it {it}: {err:.3e}", flush=True)
        if err < spec.target:
            return PointResult(snr_db, True, it, trace)
        if err < best:
            best, best_it = err, it
        elif spec.stall is not None and it - best_it >= spec.stall:
            break
    return PointResult(snr_db, False, len(trace), trace)


@dataclass
class ThresholdResult:
    threshold_db: float | None
    step_db: float | None
    points: dict
    boundary: str | None = None

    @property
    def traces(self) -> dict:
        return {s: r.trace for s, r in self.points.items()}


def de_threshold(
    spec: EnsembleSpec, snr_grid, seed: int = 0, search: str = "bisect", verbose: bool = False
) -> ThresholdResult:
    """Lowest convergent grid point.

    ``search="bisect"`` assumes monotone convergence in SNR and evaluates
    O(log grid) points; ``"scan"`` evaluates every point. When the whole
    evaluated grid is convergent (or none of it is), ``threshold_db`` is
    the lowest grid point (or ``None``) and ``boundary`` says which.
    """
    grid = [float(s) for s in snr_grid]
    if not grid:
        raise ValueError("empty SNR grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("SNR grid must be strictly increasing")
    step = min(b - a for a, b in zip(grid, grid[1:])) if len(grid) > 1 else None
    pts: dict = {}

    def run(i):
        if grid[i] not in pts:
            pts[grid[i]] = de_point(spec, grid[i], seed, verbose)
        return pts[grid[i]].converged

    if search == "scan":
        ok = [run(i) for i in range(len(grid))]
        conv = [i for i, c in enumerate(ok) if c]
        if not conv:
            return ThresholdResult(None, step, pts, "no grid point converges")
        i = conv[0]
        return ThresholdResult(grid[i], step, pts, "all grid points converge" if i == 0 else None)
    if search != "bisect":
        raise ValueError(f"unknown search {search!r}")
    hi = len(grid) - 1
    if not run(hi):
        return ThresholdResult(None, step, pts, "no grid point converges")
    if run(0):
        return ThresholdResult(grid[0], step, pts, "all grid points converge")
    lo = 0  # invariant: lo fails, hi converges
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if run(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(grid[hi], step, pts)
