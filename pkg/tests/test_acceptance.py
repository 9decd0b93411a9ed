"""Acceptance criteria 1-7.

Each test prints one ``criterion N: PASS|FAIL`` line (also repeated in the
terminal summary) and then asserts every check behind it.
"""
import time
from pathlib import Path

import numpy as np

from greenperturb import disk_analytic as da
from greenperturb.backends import NumericBackend
from greenperturb.cli import main as cli_main
from greenperturb.domain import BoundaryPerturbation, build_disk, build_star
from greenperturb.fields import constant, parse_polynomial, radial_square
from greenperturb.greenop import (
    KernelOperator,
    estimate_T_norm,
    neumann_series_helmholtz,
    neumann_series_schrodinger,
)
from greenperturb.harness import Scenario, load_scenario, run_convergence
from greenperturb.pde_solver import (
    green_beltrami_numeric,
    green_helmholtz_numeric,
    green_numeric,
    green_schrodinger_numeric,
)
from greenperturb.variation import (
    beltrami_delta_grad,
    beltrami_delta_lap,
    growth_dgdt,
    hadamard_delta,
    poisson_jensen_residual,
)
from conftest import ACCEPTANCE_LINES, random_interior

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
DISK = build_disk(1.0)
ONE = BoundaryPerturbation.constant(1.0)
J01 = 2.404825557695773
H = 1 / 128


def report(n, checks, elapsed):
    """Print the criterion line, then fail on the first failing check."""
    ok = all(passed for _, passed in checks)
    failed = [name for name, passed in checks if not passed]
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s)"
    if failed:
        line += " failed: " + ", ".join(failed)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_hadamard_disk_equality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    z, w = random_interior(rng, 20, 0.9), random_interior(rng, 20, 0.9)
    rel = []
    for a, b in zip(z, w):
        got = hadamard_delta(DISK, ONE, a, b, N=2048).value
        exact = -(1 - abs(a * b) ** 2) / abs(1 - a * np.conj(b)) ** 2 / (2 * np.pi)
        rel.append(abs(got - exact) / abs(exact))
    elapsed = time.perf_counter() - t0
    report(1, [("rel 1e-6 at 20 pairs", max(rel) <= 1e-6), ("runtime < 1 s", elapsed < 1.0)], elapsed)


def test_criterion_2_hadamard_o_eps():
    t0 = time.perf_counter()
    disk = run_convergence(Scenario("disk", "hadamard", DISK, [(0, 0.5), (0.3 + 0.2j, -0.4j)],
                                    (0.04, 0.02, 0.01, 0.005), ONE))
    star = load_scenario(SCENARIOS / "hadamard_star.cfg")
    assert star.h == H and star.eps == (0.04, 0.02, 0.01, 0.005)
    sr = run_convergence(star)
    elapsed = time.perf_counter() - t0
    print(f"  disk slope {disk.slope:.4f}; star slope {sr.slope:.4f} flag {sr.flag} floor {sr.floor_check}")
    report(2, [
        ("analytic slope >= 1.9", disk.slope >= 1.9),
        ("star slope >= 1.5 or discretization-limited",
         sr.slope >= 1.5 or sr.flag == "discretization-limited"),
        ("runtime < 2 min", elapsed < 120),
    ], elapsed)


def test_criterion_3_helmholtz_series_vs_direct():
    t0 = time.perf_counter()
    op = KernelOperator(DISK)
    norm = estimate_T_norm(op)
    rng = np.random.default_rng(3)
    probes = random_interior(rng, 10, 0.85)
    series = neumann_series_helmholtz(op, 0.5, 0.0, probes, max_terms=50, tol=1e-14)
    direct = green_helmholtz_numeric(DISK, 0.5, 0.0, H)(probes)
    diff = np.max(np.abs(series.values - direct))
    n = np.array(series.term_norms)
    ratios = n[3:] / n[2:-1]
    elapsed = time.perf_counter() - t0
    print(f"  |series - direct| {diff:.2e}; max term ratio {ratios.max():.4f}; ||T|| {norm:.6f}")
    report(3, [
        ("|series - direct| <= 1e-4", diff <= 1e-4),
        ("term ratio <= |a| ||T|| + 0.05", bool(np.all(ratios <= 0.5 * norm + 0.05))),
        ("||T|| within rel 1e-3 of 1/j01^2", abs(norm * J01**2 - 1) <= 1e-3),
        ("runtime < 1 min", elapsed < 60),
    ], elapsed)


def test_criterion_4_schrodinger_first_order():
    t0 = time.perf_counter()
    r = run_convergence(load_scenario(SCENARIOS / "schrodinger_disk.cfg"))
    # constant potential: same discrete system as the Helmholtz path
    c = 0.7
    hz = green_helmholtz_numeric(DISK, c, 0.2j, H)
    sz = green_schrodinger_numeric(DISK, constant(c), 0.2j, H)
    direct_gap = float(np.max(np.abs(hz.smooth.values - sz.smooth.values)))
    op = KernelOperator(DISK)
    probes = [0.3, -0.5 + 0.1j]
    a = neumann_series_helmholtz(op, c, 0.2j, probes, max_terms=20, tol=0.0)
    b = neumann_series_schrodinger(op, constant(1.0), c, 0.2j, probes, max_terms=20, tol=0.0)
    series_gap = max(float(np.max(np.abs(x - y))) for x, y in zip(a.partial_sums, b.partial_sums))
    elapsed = time.perf_counter() - t0
    print(f"  slope {r.slope:.4f}; direct gap {direct_gap:.1e}; series gap {series_gap:.1e}")
    report(4, [
        ("slope >= 1.9", r.slope >= 1.9),
        ("constant p direct == Helmholtz to 1e-10", direct_gap <= 1e-10),
        ("constant p series == Helmholtz to 1e-10", series_gap <= 1e-10),
        ("runtime < 1 min", elapsed < 60),
    ], elapsed)


def test_criterion_5_beltrami():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    pair_gap = []
    while len(pair_gap) < 10:
        z, w = random_interior(rng, 2, 0.75)
        if abs(z - w) < 0.05:
            continue
        c = rng.uniform(0, 1, 4)
        p = parse_polynomial(f"{c[0]:.6f} + {c[1]:.6f}*x^2 + {c[2]:.6f}*x*y + {c[3]:.6f}*y^3")
        pair_gap.append(abs(beltrami_delta_grad(DISK, p, z, w).value - beltrami_delta_lap(DISK, p, z, w).value))
    p = radial_square()
    ref = da.beltrami_disk_delta(0.5, 0.5j)
    answer = max(abs(f(DISK, p, 0.5, 0.5j).value - ref) for f in (beltrami_delta_grad, beltrami_delta_lap))
    zs = random_interior(rng, 10, 0.85)
    zs = np.where(np.abs(zs) < 0.01, 0.3, zs)
    origin = max(abs(f(DISK, p, z, 0).value - (1 - abs(z) ** 2) / (4 * np.pi))
                 for z in zs for f in (beltrami_delta_grad, beltrami_delta_lap))
    # change of variables: g*(z, 0) - g(z, 0) - eps (1 - |z|^2)/(4 pi), same grid for g and g*
    eps = np.array([0.04, 0.02, 0.01])
    z = np.array([0.3, 0.6j])
    g = green_numeric(DISK, 0.0, H)(z)
    errs = []
    for e in eps:
        lam = p.scaled(e).shifted(1.0)
        gs = green_beltrami_numeric(DISK, lam, 0.0, H)(z)
        errs.append(np.max(np.abs(gs - g - e * (1 - np.abs(z) ** 2) / (4 * np.pi))))
    slope = np.polyfit(np.log(eps), np.log(errs), 1)[0]
    elapsed = time.perf_counter() - t0
    print(f"  pair gap {max(pair_gap):.1e}; answer gap {answer:.1e}; origin gap {origin:.1e}; slope {slope:.4f}")
    report(5, [
        ("grad vs lap <= 2e-3 on 10 configurations", max(pair_gap) <= 2e-3),
        ("both forms match closed form at (0.5, 0.5i) to 1e-3", answer <= 1e-3),
        ("(1 - |z|^2)/(4 pi) at 10 probes to 1e-3", origin <= 1e-3),
        ("numeric g* slope >= 1.8", slope >= 1.8),
        ("runtime < 3 min", elapsed < 180),
    ], elapsed)


def test_criterion_6_growth():
    t0 = time.perf_counter()
    exact = -1 / (4 * np.pi**2)
    zs = [0, 0.4, 0.3j, -0.6 + 0.2j, 0.1 - 0.75j]
    rel = [abs(growth_dgdt(DISK, z) / exact - 1) for z in zs]
    elapsed = time.perf_counter() - t0
    report(6, [("rel 1e-6 at 5 probes", max(rel) <= 1e-6)], elapsed)


def test_criterion_7_structural(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    z, w = random_interior(rng, 2000, 0.98), random_interior(rng, 2000, 0.98)
    ga, gb = da.green_disk(1.0, z, w), da.green_disk(1.0, w, z)
    rim = (1 - 1e-8) * np.exp(1j * np.linspace(0, 2 * np.pi, 64))
    analytic = [
        ("analytic symmetry", np.max(np.abs(ga - gb)) <= 1e-14),
        ("analytic negativity", bool(np.all(ga < 0))),
        ("analytic boundary vanishing", np.max(np.abs(da.green_disk(1.0, rim, 0.3))) <= 1e-7),
    ]
    numeric = []
    for d in (DISK, build_star([1.0, 0.2])):
        a, b = 0.3, -0.2 + 0.4j
        ga_, gb_ = green_numeric(d, b, H), green_numeric(d, a, H)
        keep = d.boundary_distance(ga_.grid.nodes) >= 2 * H
        numeric += [
            (f"numeric symmetry ({d.kind})", abs(ga_(a) - gb_(b)) <= 1e-4),
            (f"numeric negativity ({d.kind})", float(np.max(ga_.node_values()[keep])) <= 1e-8),
            (f"numeric boundary vanishing ({d.kind})", float(np.max(np.abs(ga_(ga_.grid.bpoints)))) <= 1e-6),
        ]
    pj = poisson_jensen_residual(DISK, radial_square(), 0, N=1024, backend=NumericBackend(DISK, H))
    star = build_star([1.0, 0.2])
    sb = NumericBackend(star, 1 / 64)
    profiles = [ONE, BoundaryPerturbation([1.0, 0.5], [0.0]), BoundaryPerturbation([2.0, 0.0, 1.0], [0.0, 0.9])]
    mono = all(hadamard_delta(d, p, 0.1, -0.3j, N=512, backend=bk).value < 0
               for d, bk in ((DISK, None), (star, sb)) for p in profiles)
    code = cli_main(["selftest"])
    capsys.readouterr()
    elapsed = time.perf_counter() - t0
    report(7, analytic + numeric + [
        ("Poisson-Jensen residual <= 1e-3 at h=1/128", pj <= 1e-3),
        ("monotonicity", mono),
        ("selftest exit 0", code == 0),
    ], elapsed)
