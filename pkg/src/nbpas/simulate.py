"""Monte Carlo frame error rate campaigns and the shaped-mode presets.

Every frame draws its own generator from ``(seed, snr_index, frame_index)``
so results do not depend on how frames are split among workers. Frames
are produced in blocks, then scanned in index order to apply the stop
rule, which therefore counts exactly the same frames for any worker count.
"""

from __future__ import annotations

import csv
import io as _io
import multiprocessing as mp
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .code import LabeledParityCheck, build_code, systematic_form
from .decoder import TannerGraph, decode
from .gf import field_new
from .io import RunConfig
from .pas import (
    PasConfig,
    UniformConfig,
    awgn,
    build_priors,
    make_config,
    make_uniform_config,
    pas_transmit,
    recover_bits,
    uniform_priors,
    uniform_recover_bits,
    uniform_transmit,
)

CSV_COLUMNS = ["snr_db", "frames", "frame_errors", "fer", "codeword_fer", "avg_iters", "seconds"]


class Link:
    """Transmitter, channel and receiver around one code."""

    def __init__(self, config: PasConfig | UniformConfig, H: LabeledParityCheck, max_iter: int = 200):
        self.config = config
        self.H = H
        self.enc = systematic_form(H)
        self.graph = TannerGraph(H)
        self.max_iter = max_iter
        self.shaped = isinstance(config, PasConfig)
        # fail early on a config/code mismatch
        probe = np.zeros(config.n_data_bits, dtype=np.int64)
        if self.shaped:
            pas_transmit(probe, config, self.enc)
        else:
            uniform_transmit(probe, config, self.enc)

    def frame(self, snr: float, rng: np.random.Generator) -> tuple[bool, bool, int]:
        """One frame: ``(frame_error, codeword_error, iterations)``."""
        cfg = self.config
        bits = rng.integers(0, 2, cfg.n_data_bits)
        if self.shaped:
            tx = pas_transmit(bits, cfg, self.enc)
            pr = build_priors(awgn(tx.x, snr, rng), cfg, snr)
        else:
            tx = uniform_transmit(bits, cfg, self.enc)
            pr = uniform_priors(awgn(tx.x, snr, rng), cfg, snr)
        res = decode(self.graph, pr, self.max_iter)
        cw_err = not np.array_equal(res.codeword, tx.codeword)
        if self.shaped:
            got = recover_bits(res.codeword, cfg)
        else:
            got = uniform_recover_bits(res.codeword, cfg)
        fr_err = got is None or not np.array_equal(got, bits)
        return fr_err, cw_err, res.iterations


@dataclass
class FerPoint:
    snr_db: float
    frames: int
    frame_errors: int
    codeword_errors: int
    iterations: int
    seconds: float

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def codeword_fer(self) -> float:
        return self.codeword_errors / self.frames if self.frames else 0.0

    @property
    def avg_iters(self) -> float:
        return self.iterations / self.frames if self.frames else 0.0

    def row(self) -> list[str]:
        return [
            f"{self.snr_db:g}",
            str(self.frames),
            str(self.frame_errors),
            f"{self.fer:.6e}",
            f"{self.codeword_fer:.6e}",
            f"{self.avg_iters:.4f}",
            f"{self.seconds:.3f}",
        ]


@dataclass
class SimCampaign:
    snr_db: list
    seed: int = 1
    min_frame_errors: int = 100
    max_frames: int = 100_000
    workers: int = 1
    block: int = 64
    stop_fer: float | None = None

    def __post_init__(self):
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be at least 1")
        if self.max_frames < 1 or self.workers < 1 or self.block < 1:
            raise ValueError("max_frames, workers and block must be positive")


_LINK: Link | None = None


def _init_worker(link):
    global _LINK
    _LINK = link


def _run_block(args):
    seed, si, snr, start, stop = args
    out = []
    for f in range(start, stop):
        rng = np.random.default_rng([seed, si, f])
        out.append(_LINK.frame(snr, rng))
    return out


def run_fer(link: Link, campaign: SimCampaign, progress=None) -> list[FerPoint]:
    """Simulate every SNR of the campaign until ``min_frame_errors`` frame
    errors or ``max_frames`` frames.

    With ``campaign.stop_fer`` set, the sweep ends after the first point
    whose FER falls below it.
    """
    pool = None
    if campaign.workers > 1:
        ctx = mp.get_context("fork")
        pool = ctx.Pool(campaign.workers, initializer=_init_worker, initargs=(link,))
    else:
        _init_worker(link)
    results = []
    try:
        for si, snr_db in enumerate(campaign.snr_db):
            snr = 10.0 ** (snr_db / 10.0)
            t0 = time.perf_counter()
            frames = errs = cw_errs = iters = 0
            next_frame = 0
            done = False
            while not done:
                span = campaign.block * campaign.workers
                hi = min(next_frame + span, campaign.max_frames)
                jobs = [
                    (campaign.seed, si, snr, s, min(s + campaign.block, hi))
                    for s in range(next_frame, hi, campaign.block)
                ]
                blocks = pool.map(_run_block, jobs) if pool else [_run_block(j) for j in jobs]
                next_frame = hi
                for fr_err, cw_err, it in (r for b in blocks for r in b):
                    frames += 1
                    errs += fr_err
                    cw_errs += cw_err
                    iters += it
                    if errs >= campaign.min_frame_errors or frames >= campaign.max_frames:
                        done = True
                        break
            pt = FerPoint(snr_db, frames, errs, cw_errs, iters, time.perf_counter() - t0)
            results.append(pt)
            if progress is not None:
                progress(pt)
            if campaign.stop_fer is not None and pt.fer < campaign.stop_fer:
                break
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return results


def fer_csv(points: list[FerPoint]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        w.writerow(p.row())
    return buf.getvalue()


def snr_at_fer(points: list[FerPoint], target: float = 1e-3, codeword: bool = False) -> float | None:
    """SNR where the curve crosses ``target``, interpolating log10(FER)
    linearly between the bracketing points."""
    pts = sorted(points, key=lambda p: p.snr_db)
    val = [(p.snr_db, p.codeword_fer if codeword else p.fer) for p in pts]
    for (s0, f0), (s1, f1) in zip(val, val[1:]):
        if f0 >= target > f1:
            if f1 == 0:
                return s1
            l0, l1, lt = np.log10(f0), np.log10(f1), np.log10(target)
            return float(s0 + (lt - l0) * (s1 - s0) / (l1 - l0))
    return None


# --- presets --------------------------------------------------------------


@dataclass(frozen=True)
class ModePreset:
    signaling: str
    m: int
    q: int
    n: int
    R_t: Fraction
    d_c: int
    lifting_n: int
    expect: dict | None = None


MODES = {
    "mode1": ModePreset("shaped", 3, 64, 192, Fraction(3, 2), 8, 24,
                        dict(gamma=Fraction(1, 4), R_dm=Fraction(5, 4), k_dm=240, n_c_bin=576)),
    "mode2": ModePreset("shaped", 3, 256, 256, Fraction(2), 8, 24,
                        dict(gamma=Fraction(1, 4), R_dm=Fraction(7, 4), k_dm=448, n_c_bin=768)),
    "mode3": ModePreset("shaped", 4, 64, 252, Fraction(11, 4), 12, 28,
                        dict(gamma=Fraction(1, 3), R_dm=Fraction(29, 12), k_dm=609, n_c_bin=1008)),
    "mode1-f256": ModePreset("shaped", 3, 256, 192, Fraction(3, 2), 8, 18,
                             dict(gamma=Fraction(1, 4), R_dm=Fraction(5, 4), k_dm=240, n_c_bin=576)),
    "uniform": ModePreset("uniform", 3, 64, 192, Fraction(3, 2), 4, 48),
}


def preset_run_config(name: str) -> RunConfig:
    if name not in MODES:
        raise ValueError(f"unknown mode {name!r}; choose from {', '.join(MODES)}")
    p = MODES[name]
    return RunConfig(
        field_order=p.q, dc=p.d_c, lifting_n=p.lifting_n, m_ask=p.m, rate_t=str(p.R_t),
        n_channel_uses=p.n, signaling=p.signaling,
    )


def config_from_run(rc: RunConfig) -> PasConfig | UniformConfig:
    if rc.signaling == "uniform":
        cfg = make_uniform_config(rc.m_ask, rc.field_order, rc.n_channel_uses, d_c=rc.dc)
        if cfg.R_t != Fraction(rc.rate_t):
            raise ValueError(f"uniform code carries R_t={cfg.R_t}, config asks {rc.rate_t}")
        return cfg
    return make_config(rc.m_ask, rc.field_order, rc.n_channel_uses, Fraction(rc.rate_t), d_c=rc.dc)


def code_from_run(rc: RunConfig, cfg) -> LabeledParityCheck:
    if rc.lifting_n * rc.dc // 2 != cfg.n_c:
        raise ValueError(
            f"lifting_n * dc / 2 = {rc.lifting_n * rc.dc // 2} must equal n_c = {cfg.n_c}"
        )
    return build_code(rc.dc, rc.lifting_n, field_new(cfg.p), seed=rc.code_seed)


def check_preset(name: str, cfg) -> None:
    """Verify the bookkeeping of a preset; raises on any mismatch."""
    exp = MODES[name].expect
    if not exp:
        return
    got = dict(gamma=cfg.gamma, R_dm=cfg.R_dm, k_dm=cfg.k_dm, n_c_bin=cfg.n_c_bin)
    bad = {k: (got[k], v) for k, v in exp.items() if got[k] != v}
    if bad:
        raise ValueError(f"preset {name} violated: " + ", ".join(f"{k}={g} (want {w})" for k, (g, w) in bad.items()))


def run_mode(name: str, rc: RunConfig | None = None, H: LabeledParityCheck | None = None,
             progress=None, sweep: bool = True):
    """Build (or use) the code of a named mode, check its bookkeeping and
    optionally run the FER sweep.

    Returns ``(config, H, points)``; ``points`` is empty without a sweep.
    """
    base = preset_run_config(name)
    if rc is not None:
        for key in ("seed", "snr_start_db", "snr_stop_db", "snr_step_db", "max_frames",
                    "min_frame_errors", "max_iters", "workers", "code_seed"):
            setattr(base, key, getattr(rc, key))
    cfg = config_from_run(base)
    check_preset(name, cfg)
    if H is None:
        H = code_from_run(base, cfg)
    if not sweep:
        return cfg, H, []
    link = Link(cfg, H, base.max_iters)
    camp = SimCampaign(base.snr_grid, base.seed, base.min_frame_errors, base.max_frames, base.workers)
    return cfg, H, run_fer(link, camp, progress)
