"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (printed and repeated in the terminal
summary) before asserting. Criteria 3 and 4 run the full-scale density
evolution and FER campaigns and take hours; they are marked ``slow`` so
``pytest -m "not slow"`` skips them.
"""

import os
from fractions import Fraction

import numpy as np
import pytest

from nbpas.analysis import EnsembleSpec, de_threshold
from nbpas.code import syndrome
from nbpas.decoder import decode, wht, xor_convolve
from nbpas.gf import field_new
from nbpas.pas import demap_amplitude, demap_sign
from nbpas.rates import db_to_lin, gallager_e0, gallager_exponent, gallager_rcb, shannon_limit_snr
from nbpas.shaping import DmCodebook, dm_decode, dm_encode, entropy, rate_loss
from nbpas.simulate import (
    Link,
    SimCampaign,
    check_preset,
    config_from_run,
    preset_run_config,
    run_fer,
    run_mode,
    snr_at_fer,
)
from oracles import (
    PA8,
    brute_marginals,
    direct_xor_conv,
    field_axiom_failures,
    joint_oracle,
    multinomial_oracle,
    random_loopy_code,
    random_tree_code,
)

REFERENCE_LIMITS = {
    "mode1": (8.451, 8.462, 8.484),
    "mode2": (11.761, 11.898, 11.920),
    "mode3": (16.460, 16.497, 16.512),
}


def test_criterion_01_shannon_limits(acceptance):
    worst = 0.0
    got = {}
    for name, want in REFERENCE_LIMITS.items():
        cfg = config_from_run(preset_run_config(name))
        pX = cfg.constellation.point_distribution(cfg.pA)
        rt = float(cfg.R_t)
        vals = (
            shannon_limit_snr(rt, "cap"),
            shannon_limit_snr(rt, "smd", cfg.constellation, pX),
            shannon_limit_snr(rt, "bmd", cfg.constellation, pX),
        )
        got[name] = "/".join(f"{v:.3f}" for v in vals)
        worst = max(worst, max(abs(a - b) for a, b in zip(vals, want)))
    ok = worst <= 0.02
    acceptance(1, ok, f"Shannon limits cap/smd/bmd {got}, max deviation {worst:.4f} dB (tol 0.02)")
    assert ok


def test_criterion_02_bookkeeping(acceptance):
    want = {
        "mode1": (Fraction(1, 4), Fraction(5, 4), 240, 192, 576),
        "mode2": (Fraction(1, 4), Fraction(7, 4), 448, 256, 768),
        "mode3": (Fraction(1, 3), Fraction(29, 12), 609, 252, 1008),
    }
    bad = []
    for name, w in want.items():
        cfg = config_from_run(preset_run_config(name))
        check_preset(name, cfg)
        got = (cfg.gamma, cfg.R_dm, cfg.k_dm, cfg.n, cfg.n_c * cfg.p)
        if got != w:
            bad.append(f"{name}: {got} != {w}")
    r3 = float(config_from_run(preset_run_config("mode3")).R_dm)
    ok = not bad and round(r3, 4) == 2.4167
    acceptance(2, ok, "gamma, R_dm, k/n, n_c,bin exact for mode1-3" if ok else "; ".join(bad))
    assert ok


DE_CASES = [
    ("shaped F64", "mode1", 8.76),
    ("shaped F256", "mode1-f256", 8.79),
    ("uniform F64", "uniform", 9.54),
]
DE_STALL = 100


@pytest.mark.slow
def test_criterion_03_de_thresholds(acceptance):
    results = []
    for label, mode, target in DE_CASES:
        rc = preset_run_config(mode)
        cfg = config_from_run(rc)
        spec = EnsembleSpec(rc.dc, field_new(cfg.p), cfg, population=100_000, max_iter=500,
                            target=1e-5, stall=DE_STALL)
        grid = np.round(np.arange(target - 1.0, target + 1.0 + 1e-9, 0.05), 2)
        res = de_threshold(spec, grid, seed=1)
        thr = res.threshold_db
        results.append((label, target, thr, thr is not None and res.boundary is None and abs(thr - target) <= 0.15))
    ok = all(r[3] for r in results)
    detail = ", ".join(f"{lab} {thr} dB (want {t:.2f})" for lab, t, thr, _ in results)
    acceptance(3, ok, f"DE thresholds: {detail}; tol 0.15 dB")
    assert ok


@pytest.mark.slow
def test_criterion_04_fer_ordering(acceptance):
    workers = os.cpu_count() or 1
    grid = list(np.round(np.arange(9.5, 13.01, 0.25), 2))
    at = {}
    enough = True
    for mode in ("mode1", "uniform", "mode1-f256"):
        cfg, H, _ = run_mode(mode, sweep=False)
        camp = SimCampaign(grid, seed=1, min_frame_errors=100, max_frames=3_000_000,
                           workers=workers, stop_fer=1e-3)
        pts = run_fer(Link(cfg, H, 200), camp)
        enough &= all(p.frame_errors >= 100 for p in pts)
        at[mode] = snr_at_fer(pts, 1e-3)
        print(mode, [(p.snr_db, p.frames, p.frame_errors) for p in pts], at[mode])
    s64, uni, s256 = at["mode1"], at["uniform"], at["mode1-f256"]
    ok = (
        None not in (s64, uni, s256)
        and s64 < uni
        and abs(s64 - s256) <= 0.15
        and enough
    )
    fmt = lambda v: "n/a" if v is None else f"{v:.3f}"
    acceptance(4, ok, f"SNR at FER 1e-3: shaped F64 {fmt(s64)}, uniform F64 {fmt(uni)}, "
                      f"shaped F256 {fmt(s256)} dB; >=100 errors per point: {enough}")
    assert ok


def test_criterion_05_decoder_oracles(acceptance):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        H = random_tree_code(rng)
        assert H.n_c <= 8 and H.q <= 8
        pr = rng.dirichlet(np.ones(H.q), size=H.n_c)
        res = decode(H, pr, max_iter=2 * H.n_c + 2, early_stop=False)
        worst = max(worst, np.abs(res.posterior - brute_marginals(H, pr)).max())
    valid = conv = 0
    for _ in range(50):
        H = random_loopy_code(rng)
        pr = rng.dirichlet(np.full(H.q, 0.5), size=H.n_c)
        res = decode(H, pr, max_iter=50)
        if res.converged:
            conv += 1
            valid += not syndrome(H, res.codeword).any()
    ok = worst < 1e-9 and valid == conv and conv > 0
    acceptance(5, ok, f"tree max |BP - brute| {worst:.1e}; loopy converged {conv}/50, valid {valid}/{conv}")
    assert ok


def test_criterion_06_demapper_oracles(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    cases = [("amp", L) for L in (1, 2, 3)] + [("sign", p) for p in (4, 6)]
    for kind, L in cases:
        for snr in (0.5, 3.0, 12.0):
            y = rng.standard_normal(L) * 1.2
            f = demap_amplitude if kind == "amp" else demap_sign
            got = f(y, PA8, 3, snr)
            want = joint_oracle(y, PA8, 3, snr, kind)
            worst = max(worst, np.max(np.abs(got - want) / want))
    ok = worst <= 1e-9
    acceptance(6, ok, f"amplitude l=1,2,3 and sign p=4,6 vs exhaustive marginalization: max rel err {worst:.1e}")
    assert ok


def test_criterion_07_dm(acceptance):
    rng = np.random.default_rng(7)
    details = []
    ok = True
    for name in ("mode1", "mode2", "mode3"):
        cb = config_from_run(preset_run_config(name)).codebook
        fails = 0
        for _ in range(10_000):
            bits = rng.integers(0, 2, cb.k)
            fails += not np.array_equal(dm_decode(dm_encode(bits, cb), cb), bits)
        k_ok = cb.k == multinomial_oracle(cb.composition).bit_length() - 1
        loss = rate_loss(cb.distribution, cb.k, cb.n)
        ok &= fails == 0 and k_ok and loss >= 0
        details.append(f"{name} k={cb.k} loss={loss:.4f} fails={fails}")
    for _ in range(200):
        comp = rng.integers(0, 40, size=int(rng.integers(2, 9)))
        if comp.sum() == 0:
            continue
        cb = DmCodebook.from_composition(range(1, 2 * len(comp), 2), comp)
        ok &= rate_loss(cb.distribution, cb.k, cb.n) >= 0
        ok &= entropy(cb.distribution) * cb.n >= cb.k
    acceptance(7, ok, "; ".join(details) + "; random compositions loss >= 0")
    assert ok


def test_criterion_08_field_and_wht(acceptance):
    bad = {F.q: field_axiom_failures(F) for F in map(field_new, (2, 4, 6, 8))}
    worst = 0.0
    rng = np.random.default_rng(8)
    for q in (4, 64, 256):
        a, b = rng.random(q), rng.random(q)
        d = direct_xor_conv(a, b)
        worst = max(worst, np.abs(xor_convolve(a, b) - d).max())
        worst = max(worst, np.abs(wht(d) - wht(a) * wht(b)).max() / np.abs(wht(d)).max())
    ok = not any(bad.values()) and worst <= 1e-12
    acceptance(8, ok, f"axiom failures {bad}; WHT convolution max err {worst:.1e}")
    assert ok


def test_criterion_09_rcb(acceptance):
    cfg = config_from_run(preset_run_config("mode1"))
    pX = cfg.constellation.point_distribution(cfg.pA)
    pts = cfg.constellation.points
    R, n = 1.5, cfg.n
    snrs = np.arange(8.0, 14.01, 0.5)
    b_snr = [gallager_rcb(n, R, db_to_lin(s), pX, pts) for s in snrs]
    b_n = [gallager_rcb(k, R, db_to_lin(10.0), pX, pts) for k in (48, 96, 192, 384, 768)]
    mono = all(x >= y for x, y in zip(b_snr, b_snr[1:])) and all(x >= y for x, y in zip(b_n, b_n[1:]))
    bounded = all(0 <= b <= 1 for b in b_snr + b_n)
    worst = 0.0
    for s in (9.0, 10.0, 12.0):
        snr = db_to_lin(s)
        e, _ = gallager_exponent(R, snr, pX, pts)
        grid = np.linspace(0, 1, 10001)
        dense = max(max(gallager_e0(r, snr, pX, pts) - R * r for r in grid), 0.0)
        worst = max(worst, abs(e - dense))
    ok = mono and bounded and worst <= 1e-6
    acceptance(9, ok, f"RCB <= 1: {bounded}; non-increasing in SNR and n: {mono}; "
                      f"golden section vs dense rho grid {worst:.1e}")
    assert ok


def test_criterion_10_noiseless(acceptance):
    errs = {}
    for mode in ("mode1", "mode2", "mode3", "mode1-f256", "uniform"):
        cfg, H, _ = run_mode(mode, sweep=False)
        (p,) = run_fer(Link(cfg, H, 200), SimCampaign([30.0], seed=10, min_frame_errors=1, max_frames=1000))
        errs[mode] = (p.frames, p.frame_errors)
    ok = all(v == (1000, 0) for v in errs.values())
    acceptance(10, ok, "30 dB (frames, errors): " + ", ".join(f"{k} {v}" for k, v in errs.items()))
    assert ok
