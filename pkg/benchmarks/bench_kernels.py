"""Compare the numba and numpy versions of every hot kernel.

    python3 benchmarks/bench_kernels.py [--nodes 256] [--points 2000] [--repeat 5]

Inputs are built from the three-obstacle workspace: the composite map
comes from a converged Koebe run, and the query points are random free-space
points. ``composite_eval x1`` makes 200 single-point calls, the access
pattern of the trajectory integrator. Each kernel is checked for agreement
between backends before timing.
"""
import argparse
import time
import warnings

import numpy as np

from confnav import kernels, scenarios
from confnav.geometry import point_in_free_space, workspace_from_dict
from confnav.koebe import run_koebe


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=256)
    ap.add_argument("--points", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    ws = workspace_from_dict(scenarios.three_obstacles(args.nodes))
    cm, rep = run_koebe(ws)
    pack = tuple(cm.pack)
    rng = np.random.default_rng(0)
    z = rng.uniform(-1.6, 1.6, 8 * args.points) + 1j * rng.uniform(-1.6, 1.6, 8 * args.points)
    z = z[point_in_free_space(ws, z)][:args.points]
    curve = ws.external
    vals = curve.gamma ** 2
    a = np.cumsum(rng.normal(size=800) + 1j * rng.normal(size=800)) * 0.01
    b = a + 0.01 * (rng.normal(size=800) + 1j * rng.normal(size=800))

    cases = {
        "composite_eval": (kernels.composite_eval_numba, kernels.composite_eval_numpy,
                           pack + (z,)),
        "composite_eval x1": (lambda *a: [kernels.composite_eval_numba(*a[:-1], a[-1][i:i + 1])
                                          for i in range(200)][-1],
                              lambda *a: [kernels.composite_eval_numpy(*a[:-1], a[-1][i:i + 1])
                                          for i in range(200)][-1],
                              pack + (z,)),
        "cauchy_sums": (kernels.cauchy_sums_numba, kernels.cauchy_sums_numpy,
                        (curve.gamma, curve.weights, vals, z, 1e-14)),
        "winding_clearance": (kernels.winding_clearance_numba,
                              kernels.winding_clearance_numpy, (curve.gamma, z)),
        "frechet(800x800)": (kernels.frechet_numba, kernels.frechet_numpy, (a, b)),
    }
    print(f"nodes={args.nodes} points={len(z)} stages={len(cm.stages)} "
          f"(best of {args.repeat})")
    print(f"{'kernel':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max diff':>12}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name, (f_nb, f_np, inp) in cases.items():
            r_nb = f_nb(*inp)  # compile
            r_np = f_np(*inp)
            r_nb = r_nb if isinstance(r_nb, tuple) else (r_nb,)
            r_np = r_np if isinstance(r_np, tuple) else (r_np,)
            diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y))))
                       for x, y in zip(r_nb, r_np) if np.all(np.isfinite(x)))
            t_nb = best_of(lambda: f_nb(*inp), args.repeat)
            t_np = best_of(lambda: f_np(*inp), args.repeat)
            print(f"{name:<20}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
