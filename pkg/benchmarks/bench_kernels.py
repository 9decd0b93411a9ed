"""Compiled core against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``.  Each kernel is timed on
identical inputs with :mod:`timeit`, best of five.
"""
import timeit

import numpy as np

from greenperturb import _fallback
from greenperturb.domain import build_star
from greenperturb.pde_solver import Grid

try:
    from greenperturb import _core
except ImportError:  # extension not built
    _core = None


def cases():
    rng = np.random.default_rng(0)
    n = 200_000
    dx, dy = rng.normal(size=(2, n)) * 0.1
    a, b = rng.uniform(0.01, 0.2, size=(2, n))
    pts = 0.9 * np.sqrt(rng.uniform(0, 1, 600)) * np.exp(2j * np.pi * rng.uniform(0, 1, 600))
    grid = Grid(build_star([1.0, 0.2], [0.0, 0.0, 0.1]), 1 / 128)
    coef = (grid.domain.cos_coeffs, grid.domain.sin_coeffs)
    ang = rng.uniform(0, 2 * np.pi, 20_000)
    p = 0.97 * grid.domain.rho(ang) * np.exp(1j * ang)
    u = np.exp(1j * ang)
    return {
        "rect_log_mean (2e5 cells)": lambda m: m.rect_log_mean(dx, dy, a, b),
        "disk_kernel (600 x 600)": lambda m: m.disk_kernel(pts, pts, 1.0),
        "sw_assemble (h = 1/128)": lambda m: m.sw_assemble(grid.index, grid.frac, grid.h),
        "star_crossings (2e4 rays)": lambda m: m.star_crossings(p.real, p.imag, u.real, u.imag, 0.05, *coef),
    }


def main():
    impls = [("fallback", _fallback)] + ([("compiled", _core)] if _core is not None else [])
    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name, _ in impls) + ("   speedup" if len(impls) > 1 else ""))
    for label, fn in cases().items():
        times = [min(timeit.repeat(lambda: fn(m), number=1, repeat=5)) for _, m in impls]
        line = f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[0] / times[1]:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
