import numpy as np
import pytest
from hypothesis import given, strategies as st

from greenperturb import disk_analytic as da
from conftest import random_interior

TWO_PI = 2 * np.pi


def test_green_value():
    assert da.green_disk(1.0, 0.0, 0.5) == pytest.approx(np.log(0.5) / TWO_PI, abs=1e-15)
    assert da.green_disk(1.0, 0.0, 0.5) == pytest.approx(-0.1103178, abs=1e-7)


def test_green_diagonal_is_minus_infinity():
    assert da.green_disk(1.0, 0.3j, 0.3j) == -np.inf


def test_green_rejects_outside():
    with pytest.raises(ValueError):
        da.green_disk(1.0, 1.2, 0.0)


def test_green_boundary_vanishing():
    z = (1 - 1e-8) * np.exp(1j * np.linspace(0, 2 * np.pi, 13))
    assert np.max(np.abs(da.green_disk(1.0, z, 0.5))) < 1e-7


def test_symmetry_and_negativity_random(rng):
    z = random_interior(rng, 10_000, 0.999)
    w = random_interior(rng, 10_000, 0.999)
    g = da.green_disk(1.0, z, w)
    assert np.all(g < 0)
    assert np.max(np.abs(g - da.green_disk(1.0, w, z))) < 1e-15


@given(st.floats(0.5, 3.0), st.complex_numbers(max_magnitude=0.9), st.complex_numbers(max_magnitude=0.9))
def test_scaling(R, z, w):
    # g_R(Rz, Rw) = g_1(z, w)
    if abs(z - w) < 1e-6:
        return
    assert da.green_disk(R, R * z, R * w) == pytest.approx(da.green_disk(1.0, z, w), abs=1e-12)


def test_gradient_matches_finite_difference():
    z, w, h = 0.3 - 0.2j, 0.1 + 0.4j, 1e-6
    fd = (da.green_disk(1.0, z + h, w) - da.green_disk(1.0, z - h, w)) / (2 * h)
    fd += 1j * (da.green_disk(1.0, z + 1j * h, w) - da.green_disk(1.0, z - 1j * h, w)) / (2 * h)
    assert abs(da.green_disk_grad(1.0, z, w) - fd) < 1e-8


def test_gradient_from_origin():
    assert da.green_disk_grad(1.0, 0.5, 0.0) == pytest.approx(1 / (TWO_PI * 0.5), abs=1e-14)


def test_normal_derivative_values():
    zeta = np.exp(1j * np.linspace(0, 2 * np.pi, 7))
    assert np.allclose(da.normal_derivative_disk(1.0, zeta, 0.0), 1 / TWO_PI, atol=1e-15)
    assert da.normal_derivative_disk(1.0, 1.0, 0.5) == pytest.approx(3 / TWO_PI, abs=1e-14)
    with pytest.raises(ValueError):
        da.normal_derivative_disk(1.0, 1.0, 1.0)


@pytest.mark.parametrize("w", [0.0, 0.5, 0.3 - 0.6j, 0.95j])
def test_harmonic_measure_total(w):
    N = 1024
    zeta = np.exp(2j * np.pi * np.arange(N) / N)
    assert np.sum(da.normal_derivative_disk(1.0, zeta, w)) * TWO_PI / N == pytest.approx(1.0, abs=1e-10)


def test_normal_derivative_matches_gradient():
    zeta = np.exp(1j * np.array([0.2, 1.9, 4.0]))
    w = 0.2 - 0.3j
    grad = da.green_disk_grad(1.0, zeta, w)
    assert np.allclose(np.real(grad * np.conj(zeta)), da.normal_derivative_disk(1.0, zeta, w), atol=1e-13)


def test_hadamard_closed_form():
    assert da.hadamard_disk_delta(0, 0) == pytest.approx(-1 / TWO_PI, abs=1e-15)
    assert da.hadamard_disk_delta(0.5, 0.5) == pytest.approx(-(5 / 3) / TWO_PI, abs=1e-15)
    assert da.hadamard_disk_delta(0.5, 0.5) == pytest.approx(-0.2652582, abs=1e-7)
    for z in (0.3, 0.7j, -0.2 + 0.5j):
        assert da.hadamard_disk_delta(z, 0) == pytest.approx(-1 / TWO_PI, abs=1e-15)


@pytest.mark.parametrize("z,w", [(0.3, -0.2 + 0.4j), (0.6j, 0.1), (-0.5 - 0.2j, 0.4 + 0.4j)])
def test_hadamard_is_radius_derivative(z, w):
    h = 1e-4
    # g_R(z, w) at fixed z, w
    fd = (da.green_disk(1 + h, z, w) - da.green_disk(1 - h, z, w)) / (2 * h)
    assert da.hadamard_disk_delta(z, w) == pytest.approx(fd, abs=1e-6)


def test_beltrami_origin():
    assert da.beltrami_disk_delta_origin(0) == pytest.approx(1 / (4 * np.pi), abs=1e-15)
    assert da.beltrami_disk_delta_origin(0.6) == pytest.approx(0.0509296, abs=1e-7)
    assert abs(da.beltrami_disk_delta_origin(1 - 1e-9)) < 1e-9


def test_beltrami_rotation_invariance():
    z, w = 0.5, 0.5j
    r = np.exp(0.7j)
    assert da.beltrami_disk_delta(r * z, r * w) == pytest.approx(da.beltrami_disk_delta(z, w), abs=1e-12)


def test_beltrami_symmetric():
    z, w = 0.3 + 0.1j, -0.4 + 0.2j
    assert da.beltrami_disk_delta(z, w) == pytest.approx(da.beltrami_disk_delta(w, z), abs=1e-12)


def test_beltrami_small_pole_limit():
    assert abs(da.beltrami_disk_delta(0.6, 1e-3) - 0.64 / (4 * np.pi)) < 1e-2


@pytest.mark.parametrize("z,w", [(0.0, 0.3), (0.3, 0.0), (0.2j, 0.2j)])
def test_beltrami_rejects_degenerate(z, w):
    with pytest.raises(ValueError):
        da.beltrami_disk_delta(z, w)
