"""Compare the compiled and numpy triangle-assembly kernels.

    python benchmarks/bench_kernels.py [--repeat 20] [--levels 24x48 48x96 96x192]
"""
import argparse
import time

import numpy as np

from burkqc import kernels
from burkqc.algebra import IDENTITY
from burkqc.minimizer import EnergyConfig, affine_map, assemble_energy, polar_disk_mesh, smooth_perturbation

FUNCTIONALS = ["local:K=2,p=3", "W+normpow:q=2", "ec:c=0.1"]


def time_call(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--levels", nargs="+", default=["24x48", "48x96", "96x192"])
    args = ap.parse_args(argv)
    backends = ["python"] + (["cython"] if kernels.compiled_available() else [])
    if len(backends) == 1:
        print("compiled kernel not built; timing the numpy path only")
    print(f"{'functional':<16} {'mesh':>8} {'triangles':>9} " + " ".join(f"{b + ' ms':>10}" for b in backends)
          + f" {'speedup':>8} {'max rel diff':>12}")
    for level in args.levels:
        rings, sectors = (int(x) for x in level.split("x"))
        mesh = polar_disk_mesh(rings, sectors)
        w = affine_map(mesh, IDENTITY, smooth_perturbation(mesh, np.random.default_rng(0), 0.05)).values
        for fs in FUNCTIONALS:
            times, outs = [], []
            for b in backends:
                en = assemble_energy(mesh, EnergyConfig(fs, backend=b), IDENTITY)
                en.penalty_weight = 1e3
                times.append(time_call(lambda: en(w), args.repeat))
                outs.append(en(w))
            speed = times[0] / times[-1]
            if len(outs) > 1:
                (e0, g0), (e1, g1) = outs
                diff = max(abs(e0 - e1) / abs(e0), np.max(np.abs(g0 - g1)) / np.max(np.abs(g0)))
            else:
                diff = 0.0
            print(f"{fs:<16} {level:>8} {mesh.n_triangles:>9} " + " ".join(f"{1e3 * t:>10.3f}" for t in times)
                  + f" {speed:>8.1f} {diff:>12.1e}")


if __name__ == "__main__":
    main()
