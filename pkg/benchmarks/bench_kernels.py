"""Compare the compiled kernels with the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from nbpas import _fallback
from nbpas.analysis import transpose_table
from nbpas.code import build_code
from nbpas.decoder import TannerGraph
from nbpas.gf import Field

try:
    from nbpas import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    for p, d_c, N in [(6, 8, 24), (8, 8, 18)]:
        F = Field(p)
        H = build_code(d_c, N, F, seed=0)
        g = TannerGraph(H)
        pr = rng.dirichlet(np.full(F.q, 0.3), size=H.n_c)
        args = (pr, g.chk_ptr, g.edge_var, g.edge_lab, g.var_ptr, g.var_edge, g.mul, g.inv, 50, 1e-30, False)
        yield f"bp_decode GF({F.q}) n_c={H.n_c} 50 it", "bp_decode", args

        n = 20_000
        pop = rng.dirichlet(np.ones(F.q), size=n)
        W = pop.copy()
        _fallback.wht_rows(W)
        K = d_c - 1
        args = (
            W, rng.integers(0, n, (n, K)), rng.integers(1, F.q, (n, K)), rng.integers(1, F.q, n),
            rng.dirichlet(np.ones(F.q), size=n), transpose_table(F), np.ascontiguousarray(F.mul_table), 1e-30,
        )
        yield f"de_step GF({F.q}) N={n} d_c={d_c}", "de_step", args

        a = rng.standard_normal((n, F.q))
        yield f"wht_rows {n}x{F.q}", "wht_rows", (a,)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s} {'numpy [s]':>10s} {'cython [s]':>10s} {'speedup':>8s}")
    for label, name, a in cases(rng):
        def run(mod):
            # wht_rows works in place; give it a fresh copy each time
            call = (a[0].copy(),) if name == "wht_rows" else a
            return getattr(mod, name)(*call)

        t_py = best_of(lambda: run(_fallback), args.repeat)
        if _core is None:
            print(f"{label:40s} {t_py:10.4f} {'n/a':>10s}")
            continue
        t_c = best_of(lambda: run(_core), args.repeat)
        print(f"{label:40s} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
