"""Time the compiled core against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_core.py [--repeat 5] [--steps 512] [--paths 1024]

Every kernel is timed on identical inputs for both backends; the best of
``--repeat`` runs is reported together with the speedup and the largest
relative difference between the two outputs.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from roughmerton import _pycore, backend
from roughmerton.kernels import KernelSpec, TimeGrid, double_step_weights, step_weights
from roughmerton.markov_approx import build_quantization
from roughmerton.models import factor_weights
from roughmerton.models.marchaud import boundary_weight


def cases(steps: int, paths: int):
    rng = np.random.default_rng(0)
    grid = TimeGrid.uniform(1.0, steps)
    frac = KernelSpec.fractional(1.0, 0.6)
    omega = step_weights(frac, grid)
    omega2, k0 = double_step_weights(frac, grid)
    db = rng.standard_normal((paths, steps)) * np.sqrt(grid.dt)
    normals = rng.standard_normal((paths, steps))
    uniforms = rng.random((paths, steps))
    g0int = np.full(steps, 0.04 * grid.dt)
    q = build_quantization(-0.75, 50)
    decay, fw = factor_weights(q.atoms, grid)
    z = np.abs(0.04 + 0.01 * rng.standard_normal((paths, steps + 1)))
    base = boundary_weight(-0.75, grid)
    f = rng.standard_normal(steps + 1)
    return {
        "toeplitz_conv": lambda m: m.toeplitz_conv(omega, f),
        "riccati_pc": lambda m: m.riccati_pc(omega, 0.5, -2.0, 0.045, 2, 1e8)[0],
        "volterra_euler": lambda m: m.volterra_euler(omega, 0.04, 2.0, 0.04, 0.3, grid.dt, db),
        "volterra_ivi": lambda m: m.volterra_ivi(omega2, k0, g0int, 2.0, 0.3, normals, uniforms)[0],
        "marchaud_nu": lambda m: m.marchaud_nu(z, decay, fw, q.masses, base, 0.04),
    }


def rel_diff(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(b), 1e-300)
    return float(np.max(np.abs(a - b) / scale))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=512)
    ap.add_argument("--paths", type=int, default=1024)
    args = ap.parse_args()

    compiled = backend._load_compiled()
    if compiled is None:
        raise SystemExit("compiled core not built; run `pip install -e . --no-build-isolation`")
    print(f"steps={args.steps} paths={args.paths} repeat={args.repeat}")
    print(f"{'kernel':<16}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max rel diff':>14}")
    for name, call in cases(args.steps, args.paths).items():
        t_py = min(timeit.repeat(lambda: call(_pycore), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: call(compiled), number=1, repeat=args.repeat))
        diff = rel_diff(call(compiled), call(_pycore))
        print(f"{name:<16}{t_py:>12.4f}{t_c:>14.4f}{t_py / t_c:>10.1f}{diff:>14.1e}")


if __name__ == "__main__":
    main()
