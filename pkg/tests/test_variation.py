import numpy as np
import pytest
from hypothesis import given, strategies as st

from greenperturb import disk_analytic as da
from greenperturb.backends import NumericBackend
from greenperturb.domain import BoundaryPerturbation, boundary_mesh, build_disk, build_star
from greenperturb.fields import Polynomial2D, constant, parse_polynomial, radial_square
from greenperturb.variation import (
    VariationResult,
    beltrami_delta_grad,
    beltrami_delta_lap,
    growth_dgdt,
    hadamard_delta,
    hadamard_delta_alternate,
    hadamard_delta_weighted,
    poisson_jensen_residual,
    sign_convention_adapter,
)
from conftest import random_interior

DISK = build_disk(1.0)
ONE = BoundaryPerturbation.constant(1.0)
TWO_PI = 2 * np.pi


def test_result_validation():
    with pytest.raises(ValueError):
        VariationResult(1.0, "bogus", 1, 0j, 0j)
    with pytest.raises(ValueError):
        VariationResult(np.nan, "hadamard", 1, 0j, 0j)


def test_hadamard_disk_examples():
    assert hadamard_delta(DISK, ONE, 0, 0).value == pytest.approx(-1 / TWO_PI, rel=1e-6)
    assert hadamard_delta(DISK, ONE, 0.5, 0.5).value == pytest.approx(-(5 / 3) / TWO_PI, rel=1e-6)


def test_hadamard_matches_closed_form(rng):
    z, w = random_interior(rng, 20), random_interior(rng, 20)
    for a, b in zip(z, w):
        assert hadamard_delta(DISK, ONE, a, b).value == pytest.approx(da.hadamard_disk_delta(a, b), rel=1e-6)


def test_hadamard_symmetric():
    p = BoundaryPerturbation([1.0, 0.3], [0.0, 0.0, 0.2])
    a = hadamard_delta(DISK, p, 0.3 + 0.1j, -0.5j).value
    b = hadamard_delta(DISK, p, -0.5j, 0.3 + 0.1j).value
    assert abs(a - b) <= 1e-12


def test_hadamard_rejects_nonpositive():
    with pytest.raises(ValueError):
        hadamard_delta(DISK, lambda t: np.cos(t), 0.1, 0.2)


def test_hadamard_rejects_outside():
    with pytest.raises(ValueError):
        hadamard_delta(DISK, ONE, 1.1, 0.2)


@given(st.floats(0.05, 2.0), st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_monotone_on_disk(c0, c1, s2):
    p = BoundaryPerturbation([c0 + 2.0, c1], [0.0, 0.0, s2])
    assert hadamard_delta(DISK, p, 0.2 - 0.3j, 0.4j, N=256).value < 0


def test_monotone_on_star():
    star = build_star([1.0, 0.2])
    backend = NumericBackend(star, 1 / 64)
    for p in (ONE, BoundaryPerturbation([1.0, 0.5], [0.0, 0.3])):
        assert hadamard_delta(star, p, 0.1, -0.3j, N=512, backend=backend).value < 0


def test_weighted_reductions():
    base = hadamard_delta(DISK, ONE, 0.2, 0.4j).value
    assert hadamard_delta_weighted(DISK, constant(1.0), ONE, 0.2, 0.4j).value == base
    r = hadamard_delta_weighted(DISK, 2.0, ONE, 0.2, 0.4j)
    assert r.tag == "hadamard_weighted"
    assert r.value == pytest.approx(base / 2, rel=1e-14)
    with pytest.raises(ValueError):
        hadamard_delta_weighted(DISK, -1.0, ONE, 0.2, 0.4j)


def test_weighted_variable_conductivity_negative():
    lam = parse_polynomial("1 + 0.3*x")
    r = hadamard_delta_weighted(DISK, lam, ONE, 0.1, -0.3, N=512, h=1 / 64)
    assert r.value < 0
    # close to the unweighted value for a mild conductivity
    assert r.value == pytest.approx(hadamard_delta(DISK, ONE, 0.1, -0.3).value, rel=0.3)


@pytest.mark.parametrize("R", [1.0, 0.5, 2.0])
def test_growth_disk(R):
    d = build_disk(R)
    for z in (0, 0.4 * R, 0.3j * R):
        assert growth_dgdt(d, z) == pytest.approx(-1 / (4 * np.pi**2 * R**2), rel=1e-6)


def test_growth_value():
    assert growth_dgdt(DISK, 0.4) == pytest.approx(-0.0253303, abs=1e-7)


def test_growth_matches_hadamard_with_density_profile():
    star = build_star([1.0, 0.1], [0.0, 0.0, 0.05])
    backend = NumericBackend(star, 1 / 64)
    mesh = boundary_mesh(star, 512)
    v0 = backend.density(0j, mesh)
    had = hadamard_delta(star, v0, 0.2j, 0, N=512, backend=backend).value
    assert growth_dgdt(star, 0.2j, N=512, backend=backend) == pytest.approx(had, rel=1e-8)


def test_growth_rejects_origin_outside():
    d = build_star([1.0, 0.0])
    with pytest.raises(ValueError):
        growth_dgdt(d, 2.0)


def test_alternate_convention_examples():
    v = hadamard_delta(DISK, ONE, 0, 0)
    alt = sign_convention_adapter(v)
    assert alt.convention == "alternate"
    assert alt.value == pytest.approx(1.0, rel=1e-12)
    assert hadamard_delta_alternate(DISK, ONE, 0, 0) == pytest.approx(1.0, rel=1e-6)


def test_alternate_relation(rng):
    p = BoundaryPerturbation([1.0, 0.2], [0.0, 0.1])
    for z, w in zip(random_interior(rng, 5), random_interior(rng, 5)):
        v = hadamard_delta(DISK, p, z, w)
        direct = hadamard_delta_alternate(DISK, p, z, w)
        assert abs(direct - (-TWO_PI) * v.value) < 1e-10
        assert abs(sign_convention_adapter(v).value - direct) < 1e-10


def test_adapter_round_trip():
    v = hadamard_delta(DISK, ONE, 0.3, 0.1j)
    back = sign_convention_adapter(sign_convention_adapter(v))
    assert back.convention == "standard"
    assert back.value == pytest.approx(v.value, rel=1e-15)


def test_adapter_rejects_other_tags():
    v = beltrami_delta_grad(DISK, radial_square(), 0.6, 0)
    with pytest.raises(ValueError):
        sign_convention_adapter(v)


def test_beltrami_examples():
    p = radial_square()
    assert beltrami_delta_grad(DISK, p, 0.6, 0).value == pytest.approx(0.0509296, abs=1e-3)
    assert beltrami_delta_lap(DISK, p, 0.6, 0).value == pytest.approx(0.0509296, abs=1e-3)
    ref = da.beltrami_disk_delta(0.5, 0.5j)
    assert beltrami_delta_grad(DISK, p, 0.5, 0.5j).value == pytest.approx(ref, abs=1e-3)
    assert beltrami_delta_lap(DISK, p, 0.5, 0.5j).value == pytest.approx(ref, abs=1e-3)


def test_beltrami_zero_and_constant():
    z, w = 0.3, -0.2j
    assert beltrami_delta_grad(DISK, Polynomial2D.from_coeffs([[0.0]]), z, w).value == 0.0
    c = 1.7
    lap = beltrami_delta_lap(DISK, constant(c), z, w).value
    grad = beltrami_delta_grad(DISK, constant(c), z, w).value
    assert lap == pytest.approx(-c * da.green_disk(1, z, w), abs=1e-12)
    assert grad == pytest.approx(lap, abs=2e-3)


def test_beltrami_rejects_diagonal():
    with pytest.raises(ValueError):
        beltrami_delta_grad(DISK, radial_square(), 0.3, 0.3 + 1e-4)
    with pytest.raises(ValueError):
        beltrami_delta_lap(DISK, radial_square(), 0.3, 0.3)


def test_beltrami_forms_agree(rng):
    for k in range(10):
        z, w = random_interior(rng, 2, 0.75)
        if abs(z - w) < 0.05:
            continue
        c = rng.uniform(-1, 1, 4)
        p = parse_polynomial(f"{abs(c[0]):.6f} + {abs(c[1]):.6f}*x^2 + {abs(c[2]):.6f}*x*y + {abs(c[3]):.6f}*y^3")
        g = beltrami_delta_grad(DISK, p, z, w).value
        lap = beltrami_delta_lap(DISK, p, z, w).value
        assert abs(g - lap) <= 2e-3


def test_beltrami_origin_profile():
    for z in (0.1, 0.35j, -0.5 + 0.2j, 0.7):
        exact = (1 - abs(z) ** 2) / (4 * np.pi)
        assert beltrami_delta_grad(DISK, radial_square(), z, 0).value == pytest.approx(exact, abs=1e-3)


def test_beltrami_on_star_forms_agree():
    star = build_star([1.0, 0.15])
    backend = NumericBackend(star, 1 / 64)
    p = radial_square()
    g = beltrami_delta_grad(star, p, 0.3, -0.3j, backend=backend, local=(32, 32), far=(64, 256)).value
    lap = beltrami_delta_lap(star, p, 0.3, -0.3j, backend=backend, local=(32, 32), far=(64, 256)).value
    assert abs(g - lap) < 2e-3


def test_poisson_jensen():
    assert poisson_jensen_residual(DISK, radial_square(), 0) <= 1e-3
    assert poisson_jensen_residual(DISK, parse_polynomial("x"), 0.3 - 0.2j) <= 1e-4
    assert poisson_jensen_residual(DISK, constant(2.0), 0.1) <= 1e-10


def test_poisson_jensen_numeric_backend():
    backend = NumericBackend(DISK, 1 / 128)
    assert poisson_jensen_residual(DISK, radial_square(), 0, N=512, backend=backend) <= 1e-3
