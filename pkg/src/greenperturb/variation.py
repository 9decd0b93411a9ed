"""First-order variations of the Green function.

Boundary formulas (domain perturbations ``zeta -> zeta + eps p(zeta) n``) use
trapezoid quadrature on a :class:`~greenperturb.domain.BoundaryMesh`; the
conductivity formulas (``lambda = 1 + eps p``) use the singular area
quadrature of :mod:`greenperturb.quadrature`.

All values follow the convention ``Delta g_w = delta_w``, so ``g < 0`` and
``g ~ log|z - w| / (2 pi)`` near the pole.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .backends import NumericBackend, backend_for
from .domain import BoundaryMesh, BoundaryPerturbation, Domain2D, boundary_mesh
from .fields import Polynomial2D, ScalarFunction, constant
from .pde_solver import DEFAULT_H
from .quadrature import singular_area_integral

__all__ = [
    "VariationResult",
    "hadamard_delta",
    "hadamard_delta_weighted",
    "hadamard_delta_alternate",
    "growth_dgdt",
    "sign_convention_adapter",
    "beltrami_delta_grad",
    "beltrami_delta_lap",
    "poisson_jensen_residual",
]

TAGS = ("hadamard", "hadamard_weighted", "growth", "beltrami_grad", "beltrami_lap")
ALT_SCALE = -2.0 * np.pi  # g_alt = -2 pi g
MIN_SEPARATION = 1e-3


@dataclass(frozen=True)
class VariationResult:
    """A first-order variation ``delta g(z, w)``.

    ``N`` is the number of boundary nodes or area quadrature points.
    ``convention`` is ``"standard"`` (``Delta g = delta``) or ``"alternate"``
    (``g = -log|z - w| + O(1)``).
    """

    value: float
    tag: str
    N: int
    z: complex
    w: complex
    convention: str = "standard"

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown formula tag {self.tag!r}")
        if not np.isfinite(self.value):
            raise ValueError("variation value is not finite")

    def __float__(self) -> float:
        return float(self.value)


def _interior(d: Domain2D, backend, *pts):
    for p in pts:
        if not d.contains(complex(p)):
            raise ValueError(f"point {p} is not inside the domain")
        if isinstance(backend, NumericBackend):
            dist = float(d.boundary_distance(complex(p))[0])
            if dist < 2 * backend.h:
                raise ValueError(f"point {p} is within 2h of the boundary")


def _separated(z, w):
    if abs(complex(z) - complex(w)) < MIN_SEPARATION:
        raise ValueError(f"|z - w| < {MIN_SEPARATION:g}: too close to the diagonal")


def _profile(p, mesh: BoundaryMesh, positive: bool = True) -> np.ndarray:
    if isinstance(p, BoundaryPerturbation):
        vals = p.on(mesh)
    elif callable(p):
        vals = np.broadcast_to(np.asarray(p(mesh.theta), dtype=float), (mesh.N,))
    else:
        vals = np.broadcast_to(np.asarray(p, dtype=float), (mesh.N,))
    if positive and np.min(vals) <= 0:
        raise ValueError("perturbation profile must be positive on the boundary")
    return np.asarray(vals, dtype=float)


def _constant_value(f) -> float | None:
    if f is None:
        return 1.0
    if isinstance(f, (int, float)):
        return float(f)
    if isinstance(f, Polynomial2D) and f.is_constant:
        return float(f.coeffs[0, 0])
    return None


def _as_field(f) -> ScalarFunction:
    if isinstance(f, ScalarFunction):
        return f
    c = _constant_value(f)
    if c is None:
        raise TypeError("expected a ScalarFunction or a constant")
    return constant(c)


def hadamard_delta(d: Domain2D, p, z, w, N: int = 2048, backend=None) -> VariationResult:
    """Variation under the outward normal motion ``eps * p`` of the boundary.

    ``delta g(z, w) = -oint dg/dn(z, .) dg/dn(w, .) p ds``.

    Parameters
    ----------
    d : Domain2D
    p : BoundaryPerturbation, callable of the polar angle, or node values
    z, w : interior points (``z == w`` is allowed)
    N : number of boundary nodes
    backend : Green backend; analytic for disks, numeric otherwise
    """
    backend = backend if backend is not None else backend_for(d)
    _interior(d, backend, z, w)
    mesh = boundary_mesh(d, N)
    pv = _profile(p, mesh)
    dz = backend.density(complex(z), mesh)
    dw = dz if complex(z) == complex(w) else backend.density(complex(w), mesh)
    val = -mesh.integrate(dz * dw * pv)
    return VariationResult(float(val), "hadamard", N, complex(z), complex(w))


def hadamard_delta_alternate(d: Domain2D, p, z, w, N: int = 2048, backend=None) -> float:
    """Same variation in the ``g = -log|z - w| + O(1)`` convention, evaluated
    directly as ``(1 / 2 pi) oint dg_alt/dn(z) dg_alt/dn(w) p ds``."""
    backend = backend if backend is not None else backend_for(d)
    _interior(d, backend, z, w)
    mesh = boundary_mesh(d, N)
    pv = _profile(p, mesh)
    dz = ALT_SCALE * backend.density(complex(z), mesh)
    dw = ALT_SCALE * backend.density(complex(w), mesh)
    return float(mesh.integrate(dz * dw * pv) / (2 * np.pi))


def hadamard_delta_weighted(d: Domain2D, lam, p, z, w, N: int = 2048, h: float = DEFAULT_H,
                            backend=None) -> VariationResult:
    """Hadamard variation for ``L = div(lam grad)``.

    The integrand carries the weight ``lam * p`` and the normal derivatives
    are those of the ``L`` Green function.  A constant ``lam = c`` reduces to
    ``hadamard_delta / c``; otherwise a numeric conductivity backend is used.
    """
    c = _constant_value(lam)
    if c is not None:
        if c <= 0:
            raise ValueError("conductivity must be positive")
        base = hadamard_delta(d, p, z, w, N, backend)
        return replace(base, value=base.value / c, tag="hadamard_weighted")
    lam = _as_field(lam)
    backend = NumericBackend(d, h, weight=lam) if backend is None else backend
    _interior(d, backend, z, w)
    mesh = boundary_mesh(d, N)
    lv = lam.at(mesh.nodes)
    if np.min(lv) <= 0:
        raise ValueError("conductivity must be positive on the boundary")
    pv = _profile(p, mesh)
    dz = backend.density(complex(z), mesh)
    dw = backend.density(complex(w), mesh)
    val = -mesh.integrate(dz * dw * lv * pv)
    return VariationResult(float(val), "hadamard_weighted", N, complex(z), complex(w))


def growth_dgdt(d: Domain2D, z, lam=None, N: int = 2048, h: float = DEFAULT_H, backend=None) -> float:
    """Rate of change of ``g(z, 0)`` under Laplacian growth from the origin.

    The boundary moves with normal velocity ``lam * dg/dn(0, .)``, giving
    ``dg/dt(z, 0) = -oint dg/dn(z, .) [lam dg/dn(0, .)]^2 ds``.
    """
    if not d.contains(0j):
        raise ValueError("the origin must lie inside the domain")
    c = _constant_value(lam)
    if c is not None and c <= 0:
        raise ValueError("conductivity must be positive")
    if backend is None:
        backend = backend_for(d) if c is not None else NumericBackend(d, h, weight=_as_field(lam))
    _interior(d, backend, z)
    mesh = boundary_mesh(d, N)
    d0 = backend.density(0j, mesh)
    dz = d0 if complex(z) == 0 else backend.density(complex(z), mesh)
    if c is not None:
        # Green functions of c * Delta are g / c
        return float(-mesh.integrate(dz * d0 * d0) / c)
    lv = _as_field(lam).at(mesh.nodes)
    return float(-mesh.integrate(dz * (lv * d0) ** 2))


def sign_convention_adapter(v: VariationResult) -> VariationResult:
    """Convert a Hadamard variation between the two Green conventions.

    ``g_alt = -2 pi g`` so ``delta g_alt = -2 pi delta g``; applying the
    adapter to an alternate-convention result converts it back.
    """
    if v.tag not in ("hadamard", "hadamard_weighted"):
        raise ValueError(f"adapter applies to Hadamard variations, not {v.tag!r}")
    if v.convention == "standard":
        return replace(v, value=v.value * ALT_SCALE, convention="alternate")
    return replace(v, value=v.value / ALT_SCALE, convention="standard")


def _field(p):
    if isinstance(p, ScalarFunction):
        return p
    return _as_field(p)


def _is_zero(p) -> bool:
    return isinstance(p, Polynomial2D) and not np.any(p.coeffs)


def beltrami_delta_grad(d: Domain2D, p, z, w, backend=None, local=(64, 64), far=None) -> VariationResult:
    """Conductivity variation ``int_D p grad g(z, .) . grad g(., w) dA``.

    ``lambda = 1 + eps p``; the result is the first-order coefficient of
    ``g*(z, w) - g(z, w)``.
    """
    backend = backend if backend is not None else backend_for(d)
    _interior(d, backend, z, w)
    _separated(z, w)
    z, w = complex(z), complex(w)
    p = _field(p)
    if _is_zero(p):
        return VariationResult(0.0, "beltrami_grad", 0, z, w)

    def integrand(xi):
        gz = backend.grad(xi, z)
        gw = backend.grad(xi, w)
        return p.at(xi) * np.real(gz * np.conj(gw))

    val, n = singular_area_integral(d, integrand, [z, w], local, far)
    return VariationResult(val, "beltrami_grad", n, z, w)


def beltrami_delta_lap(d: Domain2D, p, z, w, backend=None, local=(64, 64), far=None) -> VariationResult:
    """Conductivity variation in Laplacian form.

    ``-g(z, w) (p(z) + p(w)) / 2 + (1/2) int_D g(., z) g(., w) Delta p dA``.
    """
    backend = backend if backend is not None else backend_for(d)
    _interior(d, backend, z, w)
    _separated(z, w)
    z, w = complex(z), complex(w)
    p = _field(p)
    if _is_zero(p):
        return VariationResult(0.0, "beltrami_lap", 0, z, w)
    gzw = float(np.real(backend.value(np.array([z]), w))[0])
    head = -gzw * (p.at(z) + p.at(w)) / 2
    if _harmonic_polynomial(p):
        return VariationResult(float(head), "beltrami_lap", 0, z, w)

    def integrand(xi):
        return backend.value(xi, z) * backend.value(xi, w) * p.laplacian(xi.real, xi.imag)

    area, n = singular_area_integral(d, integrand, [z, w], local, far)
    return VariationResult(float(head + area / 2), "beltrami_lap", n, z, w)


def poisson_jensen_residual(d: Domain2D, u: ScalarFunction, z, N: int = 2048, backend=None,
                            local=(64, 64), far=None) -> float:
    """``|u(z) - oint u d(omega_z) - int_D g(z, .) Delta u dA|``."""
    backend = backend if backend is not None else backend_for(d)
    _interior(d, backend, z)
    z = complex(z)
    mesh = boundary_mesh(d, N)
    boundary = mesh.integrate(u.at(mesh.nodes) * backend.density(z, mesh))

    def integrand(xi):
        return backend.value(xi, z) * u.laplacian(xi.real, xi.imag)

    if _harmonic_polynomial(u):
        area = 0.0
    else:
        area, _ = singular_area_integral(d, integrand, [z], local, far)
    return float(abs(u.at(z) - boundary - area))


def _harmonic_polynomial(f) -> bool:
    """True when ``f`` is a polynomial with identically vanishing Laplacian."""
    if not isinstance(f, Polynomial2D):
        return False
    c = np.pad(f.coeffs, ((0, 2), (0, 2)))
    i, j = np.indices(c.shape)
    cxx = np.zeros_like(c)
    cyy = np.zeros_like(c)
    cxx[:-2, :] = (i * (i - 1) * c)[2:, :]
    cyy[:, :-2] = (j * (j - 1) * c)[:, 2:]
    return not np.any(cxx + cyy)
