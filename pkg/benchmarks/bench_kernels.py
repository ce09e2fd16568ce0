"""Compare the compiled and numpy Y-term kernels, and show how much of a sample's cost they account for.

    python3 benchmarks/bench_kernels.py [--samples 256] [--nodes 512] [--group su --n 2]
"""
import argparse
import time

import numpy as np

from wilson_lab import kernels
from wilson_lab.estimator import auto_workspace
from wilson_lab.functionals import GridDuals, make_wgrid
from wilson_lab.lie import build_basis, structure_constants
from wilson_lab.sampler import WienerConfig, sample_batch
from wilson_lab.surface import RectSurface


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--nodes", type=int, default=512)
    p.add_argument("--kappa", type=float, default=4.0)
    p.add_argument("--group", default="su")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    basis = build_basis(args.group, args.n)
    sc = structure_constants(basis)
    surf = RectSurface((0.5, 0.0, 0.0), 0.5)
    ws = auto_workspace(surf, args.kappa)
    duals = GridDuals(ws, make_wgrid(args.nodes, 0))
    cfg = WienerConfig(args.kappa, ws, basis.dim_g, 0)

    t_sample, coeffs = best_of(lambda: sample_batch(cfg, 0, args.samples), args.repeat)
    t_pair, pairs = best_of(lambda: duals.pairings(coeffs), args.repeat)
    w = duals.grid.weights
    print(f"degree {ws.degree}, dim {ws.dim}, {args.nodes} nodes, {args.samples} samples, "
          f"{args.group}({args.n})")
    print(f"{'sampling':>22}: {t_sample:8.4f} s")
    print(f"{'dual pairings':>22}: {t_pair:8.4f} s")

    results = {}
    for backend in ("python", "cython"):
        if backend == "cython" and kernels.BACKEND != "cython":
            print(f"{'kernel [cython]':>22}: not built")
            continue
        t, out = best_of(lambda: kernels.y_accumulate(*pairs, sc, w, args.kappa, backend=backend), args.repeat)
        results[backend] = (t, out)
        print(f"{'kernel [' + backend + ']':>22}: {t:8.4f} s")
    if len(results) == 2:
        (tp, op), (tc, oc) = results["python"], results["cython"]
        diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in zip(op, oc))
        print(f"{'speed-up':>22}: {tp / tc:8.2f}x   max |difference| {diff:.1e}")


if __name__ == "__main__":
    main()
