"""Command line entry point: ``nbpas <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from fractions import Fraction

import numpy as np

from . import rates
from .analysis import EnsembleSpec, de_threshold
from .gf import field_new
from .io import FormatError, RunConfig, format_code, load_code, load_config
from .pas import PasConfig
from .shaping import dm_decode, dm_encode, entropy
from .simulate import (
    MODES,
    Link,
    SimCampaign,
    check_preset,
    code_from_run,
    config_from_run,
    fer_csv,
    preset_run_config,
    run_fer,
    run_mode,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _run_config(args) -> RunConfig:
    base = preset_run_config(args.mode) if getattr(args, "mode", None) else RunConfig()
    rc = load_config(args.config, base) if args.config else base
    if args.seed is not None:
        rc.seed = args.seed
    if args.workers is not None:
        rc.workers = args.workers
    rc.validate()
    return rc


def _shaped_or_fail(cfg) -> PasConfig:
    if not isinstance(cfg, PasConfig):
        raise ValueError("this command needs signaling = shaped")
    return cfg


def cmd_rates(args) -> str:
    names = [args.mode] if args.mode else ["mode1", "mode2", "mode3"]
    rows = []
    for name in names:
        cfg = _shaped_or_fail(config_from_run(preset_run_config(name)))
        pX = cfg.constellation.point_distribution(cfg.pA)
        rt = float(cfg.R_t)
        rows.append([
            name, f"{rt:g}",
            f"{rates.shannon_limit_snr(rt, 'cap'):.4f}",
            f"{rates.shannon_limit_snr(rt, 'smd', cfg.constellation, pX):.4f}",
            f"{rates.shannon_limit_snr(rt, 'bmd', cfg.constellation, pX):.4f}",
        ])
    return _csv(["mode", "rate_t", "snr_cap_db", "snr_smd_db", "snr_bmd_db"], rows)


def cmd_bound(args) -> str:
    rc = _run_config(args)
    cfg = _shaped_or_fail(config_from_run(rc))
    pX = cfg.constellation.point_distribution(cfg.pA)
    rows = []
    for s in rc.snr_grid:
        e, rho = rates.gallager_exponent(float(cfg.R_t), 10 ** (s / 10), pX, cfg.constellation.points)
        rows.append([f"{s:g}", f"{e:.6e}", f"{rho:.6f}", f"{min(1.0, 2.0 ** (-cfg.n * e)):.6e}"])
    return _csv(["snr_db", "exponent", "rho", "rcb"], rows)


def cmd_construct(args) -> str:
    rc = _run_config(args)
    cfg = config_from_run(rc)
    return format_code(code_from_run(rc, cfg))


def cmd_dm(args) -> str:
    rc = _run_config(args)
    cfg = _shaped_or_fail(config_from_run(rc))
    cb = cfg.codebook
    rng = np.random.default_rng(rc.seed)
    ok = 0
    for _ in range(args.frames):
        bits = rng.integers(0, 2, cb.k)
        ok += np.array_equal(dm_decode(dm_encode(bits, cb), cb), bits)
    return _csv(
        ["n", "k", "rate", "entropy", "rate_loss", "nu", "composition", "roundtrips", "roundtrip_ok"],
        [[cb.n, cb.k, f"{cb.rate:.6f}", f"{entropy(cb.distribution):.6f}",
          f"{entropy(cb.distribution) - cb.rate:.6f}", f"{cfg.nu:.6f}",
          " ".join(map(str, cb.composition)), args.frames, ok]],
    )


def cmd_simulate(args) -> str:
    rc = _run_config(args)
    cfg = config_from_run(rc)
    H = load_code(args.code, field_new(cfg.p)) if args.code else code_from_run(rc, cfg)
    link = Link(cfg, H, rc.max_iters)
    camp = SimCampaign(rc.snr_grid, rc.seed, rc.min_frame_errors, rc.max_frames, rc.workers)
    prog = (lambda p: print(" ".join(p.row()), file=sys.stderr, flush=True)) if args.verbose else None
    return fer_csv(run_fer(link, camp, prog))


def cmd_threshold(args) -> str:
    rc = _run_config(args)
    cfg = config_from_run(rc)
    spec = EnsembleSpec(rc.dc, field_new(cfg.p), cfg, rc.de_population, rc.de_max_iter,
                        rc.de_target, rc.de_stall or None)
    res = de_threshold(spec, rc.snr_grid, seed=rc.seed, search=args.search, verbose=args.verbose)
    msg = f"threshold_db={res.threshold_db}"
    if res.boundary:
        msg += f" ({res.boundary})"
    print(msg, file=sys.stderr)
    rows = []
    for s in sorted(res.points):
        for i, e in enumerate(res.points[s].trace, 1):
            rows.append([f"{s:g}", i, f"{e:.6e}"])
    return _csv(["snr_db", "iteration", "symbol_error_prob"], rows)


def cmd_mode(args) -> str:
    rc = load_config(args.config, preset_run_config(args.name)) if args.config else preset_run_config(args.name)
    if args.seed is not None:
        rc.seed = args.seed
    if args.workers is not None:
        rc.workers = args.workers
    H = load_code(args.code) if args.code else None
    cfg, H, pts = run_mode(args.name, rc, H, sweep=not args.check_only)
    check_preset(args.name, cfg)
    if args.check_only:
        return _csv(
            ["mode", "gamma", "r_dm", "k", "n", "n_c", "n_c_bin"],
            [[args.name, str(cfg.gamma), str(getattr(cfg, "R_dm", "")),
              getattr(cfg, "k_dm", cfg.n_data_bits), cfg.n, cfg.n_c, cfg.n_c * cfg.p]],
        )
    return fer_csv(pts)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration")
    common.add_argument("--code", help="parity-check file")
    common.add_argument("--out", help="write CSV here instead of standard output")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="nbpas", description="Shaped non-binary LDPC coded modulation toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    modes = sorted(MODES)

    p = sub.add_parser("rates", parents=[common], help="Shannon limits (cap/smd/bmd) of the shaped modes")
    p.add_argument("--mode", choices=modes)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("bound", parents=[common], help="random coding bound over the SNR sweep")
    p.add_argument("--mode", choices=modes)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("construct", parents=[common], help="build a labeled (2, d_c) code")
    p.add_argument("--mode", choices=modes)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("dm", parents=[common], help="matcher parameters and round-trip check")
    p.add_argument("--mode", choices=modes)
    p.add_argument("--frames", type=int, default=1000)
    p.set_defaults(func=cmd_dm)

    p = sub.add_parser("simulate", parents=[common], help="frame error rate sweep")
    p.add_argument("--mode", choices=modes)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("threshold", parents=[common], help="density evolution threshold")
    p.add_argument("--mode", choices=modes)
    p.add_argument("--search", choices=["bisect", "scan"], default="bisect")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("mode", parents=[common], help="run a named preset end to end")
    p.add_argument("name", choices=modes)
    p.add_argument("--check-only", action="store_true", help="verify bookkeeping without simulating")
    p.set_defaults(func=cmd_mode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except (FormatError, ValueError) as exc:
        print(f"nbpas: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
