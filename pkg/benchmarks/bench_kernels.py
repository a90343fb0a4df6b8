"""Benchmark: compiled kernels vs the pure NumPy fallback.

Times the two dominant oracle operations (numeric curvature tensor and
covariant derivative of J) on each space's chart, and reports the speedup.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from nksix import cp3, flag, s3s3
from nksix._kernels import pure

try:
    from nksix._kernels import _fast as fast
except ImportError:
    fast = None


def _fields(backend, rng):
    pt = s3s3.random_point(rng)
    p0, q0 = pt.p.coeffs(), pt.q.coeffs()
    c = cp3.random_point(rng)
    basis = cp3.horizontal_basis(c)
    U0 = np.eye(3, dtype=complex)
    return {
        "s3s3": (backend.s3s3_metric_field(p0, q0), backend.s3s3_structure_field(p0, q0)),
        "cp3": (
            backend.cp3_metric_field(c.rep, basis, True),
            backend.cp3_structure_field(c.rep, basis, "jnk"),
        ),
        "flag": (backend.flag_metric_field(U0), backend.flag_structure_field(U0, 0)),
    }


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(np.random.Philox(0))
    x = np.zeros(6)

    backends = [("python", pure)]
    if fast is not None:
        backends.append(("compiled", fast))
    else:
        print("compiled backend unavailable; timing the fallback only")

    tables = {name: _fields(mod, np.random.default_rng(np.random.Philox(0)))
              for name, mod in backends}

    print(f"{'space':<6} {'operation':<18} " +
          " ".join(f"{name:>12}" for name, _ in backends) +
          ("   speedup" if len(backends) == 2 else ""))
    for space in ("s3s3", "cp3", "flag"):
        for opname in ("riemann", "nabla_structure"):
            times = []
            for name, mod in backends:
                met, struct = tables[name][space]
                if opname == "riemann":
                    fn = lambda: mod.riemann(met, x)
                else:
                    fn = lambda: mod.nabla_structure(met, struct, x)
                times.append(_time(fn, args.repeat))
            row = f"{space:<6} {opname:<18} " + " ".join(
                f"{t * 1e3:>10.2f}ms" for t in times
            )
            if len(times) == 2:
                row += f"   {times[0] / times[1]:>6.0f}x"
            print(row)


if __name__ == "__main__":
    main()
