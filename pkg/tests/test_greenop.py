from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, strategies as st

from greenperturb.domain import build_disk, build_star
from greenperturb.fields import constant, radial_square
from greenperturb.greenop import (
    KernelOperator,
    apply_T,
    estimate_T_norm,
    neumann_series_helmholtz,
    neumann_series_schrodinger,
    quadrature_mesh,
)
from greenperturb.pde_solver import ResonanceError, green_schrodinger_numeric

J01 = 2.404825557695773
DISK = build_disk(1.0)


@pytest.fixture(scope="module")
def op():
    return KernelOperator(DISK)


def test_mesh_weights():
    for d in (DISK, build_star([1.0, 0.2], [0.0, 0.1])):
        m = quadrature_mesh(d, 64, 128)
        assert np.all(m.weights > 0)
        assert m.weights.sum() == pytest.approx(d.area(), rel=1e-6)


def test_mesh_locate(op):
    m = op.mesh
    k = np.array([5, 1000, m.size - 1])
    assert np.array_equal(m.locate(m.nodes[k]), k)
    assert m.locate(1.5)[0] == -1


def test_T_of_one(op):
    assert apply_T(op, 1.0, 0.0) == pytest.approx(-0.25, abs=1e-4)


def test_T_of_green(op):
    assert apply_T(op, op.green_nodes(0.0), 0.0) == pytest.approx(1 / (8 * np.pi), abs=1e-4)


def test_T_of_zero(op):
    assert apply_T(op, 0.0, 0.3) == 0.0


def test_T_rejects_outside(op):
    with pytest.raises(ValueError):
        apply_T(op, 1.0, 1.2)


def test_T_one_off_centre(op):
    # T1 = (|z|^2 - 1)/4 on the unit disk
    z = np.array([0.3, -0.5j, 0.2 + 0.6j])
    assert np.allclose(apply_T(op, 1.0, z), (np.abs(z) ** 2 - 1) / 4, atol=1e-4)


def test_norm_unit_disk(op):
    assert estimate_T_norm(op) == pytest.approx(1 / J01**2, rel=1e-3)


def test_norm_radius_two():
    assert estimate_T_norm(KernelOperator(build_disk(2.0))) == pytest.approx(4 / J01**2, rel=1e-3)


def test_norm_below_schur_bound(op):
    # sup_z int |g(z, .)| dA on the disk is attained at z = 0
    schur = np.max(np.abs(apply_T(op, 1.0, np.array([0.0, 0.3, 0.7j]))))
    assert 0 < op.norm <= schur


def test_kernel_symmetry(op):
    assert op.symmetry_defect() <= 1e-10


def test_linearity(op):
    phi = op.node_values(lambda x, y: np.cos(3 * x) * y)
    psi = op.node_values(radial_square())
    z = np.array([0.1, -0.4 + 0.2j])
    lhs = apply_T(op, 2.5 * phi - 0.75 * psi, z)
    rhs = 2.5 * apply_T(op, phi, z) - 0.75 * apply_T(op, psi, z)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_helmholtz_zero(op):
    r = neumann_series_helmholtz(op, 0.0, 0.2, [0.5])
    assert r.terms == 1
    assert r.values[0] == pytest.approx(op.backend.value(np.array([0.5]), 0.2)[0], abs=0)


def test_helmholtz_first_term(op):
    # the probe sits on the pole, so the term a T g_0 (0) is formed directly
    assert 0.5 * apply_T(op, op.green_nodes(0.0), 0.0) == pytest.approx(0.5 / (8 * np.pi), abs=1e-4)
    r = neumann_series_helmholtz(op, 0.5, 0.0, [0.05], max_terms=2, tol=0.0)
    assert r.partial_sums[1][0] - r.partial_sums[0][0] == pytest.approx(0.5 * apply_T(op, op.green_nodes(0.0), 0.05), abs=1e-12)
    assert 0.5 / (8 * np.pi) == pytest.approx(0.0198944, abs=1e-7)


def test_helmholtz_term_ratio(op):
    r = neumann_series_helmholtz(op, 0.5, 0.0, [0.3, 0.1j], max_terms=12, tol=0.0)
    n = np.array(r.term_norms)
    ratios = n[3:] / n[2:-1]
    assert np.all(ratios <= 0.5 * op.norm + 0.05)


def test_helmholtz_resonance(op):
    with pytest.raises(ResonanceError):
        neumann_series_helmholtz(op, 6.0, 0.0, [0.3])


def test_schrodinger_zero(op):
    r = neumann_series_schrodinger(op, radial_square(), 0.0, 0.1, [0.4])
    assert r.terms == 1


def test_schrodinger_constant_matches_helmholtz(op):
    probes = [0.3, -0.2j]
    a = neumann_series_helmholtz(op, 0.8, 0.1, probes, max_terms=10, tol=0.0)
    b = neumann_series_schrodinger(op, constant(1.0), 0.8, 0.1, probes, max_terms=10, tol=0.0)
    assert a.terms == b.terms
    for x, y in zip(a.partial_sums, b.partial_sums):
        assert np.max(np.abs(x - y)) < 1e-10


def test_schrodinger_matches_direct(op, rng):
    probes = 0.7 * np.sqrt(rng.uniform(0, 1, 10)) * np.exp(2j * np.pi * rng.uniform(0, 1, 10))
    probes = probes[np.abs(probes - 0.4) > 0.05]
    series = neumann_series_schrodinger(op, radial_square(), 0.5, 0.4, probes, tol=1e-12)
    direct = green_schrodinger_numeric(DISK, radial_square(0.5), 0.4, 1 / 128)(probes)
    assert np.max(np.abs(series.values - direct)) < 1e-4


@pytest.mark.parametrize("a", [0.5, -1.5, 3.0])
def test_truncation_bound_holds(op, a):
    short = neumann_series_helmholtz(op, a, 0.1, [0.35, -0.5j], tol=1e-6)
    longer = neumann_series_helmholtz(op, a, 0.1, [0.35, -0.5j], max_terms=short.terms + 3, tol=0.0)
    assert np.max(np.abs(longer.values - short.values)) <= short.residual_bound


def test_schrodinger_first_order(op):
    p = radial_square()
    z, w = np.array([0.3, -0.4j]), 0.1
    g = op.backend.value(z, w)
    first = apply_T(op, op.node_values(p) * op.green_nodes(w), z)
    eps = np.array([0.4, 0.2, 0.1, 0.05])
    err = [np.max(np.abs(neumann_series_schrodinger(op, p, e, w, z).values - g - e * first)) for e in eps]
    assert np.polyfit(np.log(eps), np.log(err), 1)[0] >= 1.9


def test_numeric_backend_operator():
    from greenperturb.backends import NumericBackend

    op = KernelOperator(DISK, backend=NumericBackend(DISK, 1 / 64))
    assert apply_T(op, 1.0, 0.3) == pytest.approx((0.09 - 1) / 4, abs=1e-3)
    assert op.symmetry_defect() < 1e-3


def test_concurrent_applications(op):
    phis = [op.node_values(lambda x, y, k=k: np.cos(k * x)) for k in range(4)]
    z = np.array([0.2, 0.5j])
    serial = [apply_T(op, p, z) for p in phis]
    with ThreadPoolExecutor(4) as ex:
        threaded = list(ex.map(lambda p: apply_T(op, p, z), phis))
    for a, b in zip(serial, threaded):
        assert np.array_equal(a, b)


@given(st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_linearity_property(alpha, beta):
    op = _shared()
    z = np.array([0.25 - 0.1j])
    one = apply_T(op, 1.0, z)
    r2 = apply_T(op, radial_square(), z)
    both = apply_T(op, op.node_values(lambda x, y: alpha + beta * (x * x + y * y)), z)
    assert abs(both[0] - alpha * one[0] - beta * r2[0]) < 1e-12 * (1 + abs(alpha) + abs(beta))


_CACHE = {}


def _shared():
    if "op" not in _CACHE:
        _CACHE["op"] = KernelOperator(DISK, ns=32, nt=64)
    return _CACHE["op"]
