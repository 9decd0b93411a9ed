"""Star-shaped planar domains with trigonometric boundary radius.

A domain is described by its boundary radius ``rho(theta) = a0 + sum_k
a_k cos(k theta) + b_k sin(k theta)``; the disk is the special case
``rho == R``.  Points are complex numbers throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Domain2D",
    "BoundaryMesh",
    "BoundaryPerturbation",
    "build_disk",
    "build_star",
    "boundary_mesh",
    "perturb",
    "moved_points",
    "DomainError",
]

_DENSE = 4096
_BLOCK = 1024
_BOUNDARY_SLACK = 1e-12


class DomainError(ValueError):
    """Invalid domain, mesh, or perturbation."""


def _trig_eval(a: np.ndarray, b: np.ndarray, theta, deriv: int = 0):
    theta = np.asarray(theta, dtype=float)
    k = np.arange(len(a))
    kt = np.multiply.outer(theta, k)
    c, s = np.cos(kt), np.sin(kt)
    # d^n/dtheta^n of cos(k t), sin(k t)
    if deriv == 0:
        return c @ a + s @ b
    if deriv == 1:
        return -s @ (k * a) + c @ (k * b)
    if deriv == 2:
        return -c @ (k**2 * a) - s @ (k**2 * b)
    raise ValueError("deriv must be 0, 1 or 2")


def _pad(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float)) if b is not None else np.zeros(1)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    b = b.copy()
    b[0] = 0.0
    return a, b


@dataclass(frozen=True, eq=False)
class Domain2D:
    """Bounded star-shaped domain (with respect to the origin).

    ``cos_coeffs[k]`` multiplies ``cos(k theta)``; ``sin_coeffs[0]`` is
    ignored and stored as zero.
    """

    kind: str
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    @property
    def radius(self) -> float:
        if self.kind != "disk":
            raise DomainError("radius is only defined for disks")
        return float(self.cos_coeffs[0])

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.abs(self.cos_coeffs) + np.abs(self.sin_coeffs))[0]
        return int(nz[-1]) if len(nz) else 0

    def rho(self, theta):
        return _trig_eval(self.cos_coeffs, self.sin_coeffs, theta)

    def drho(self, theta):
        return _trig_eval(self.cos_coeffs, self.sin_coeffs, theta, 1)

    def d2rho(self, theta):
        return _trig_eval(self.cos_coeffs, self.sin_coeffs, theta, 2)

    def point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.rho(theta) * np.exp(1j * theta)

    def contains(self, z) -> np.ndarray | bool:
        """Strict interior test; points within 1e-12 of the boundary are exterior."""
        z = np.asarray(z, dtype=complex)
        inside = np.abs(z) < self.rho(np.angle(z)) - _BOUNDARY_SLACK
        return bool(inside) if inside.ndim == 0 else inside

    def boundary_distance(self, z) -> np.ndarray:
        """Distance to the boundary, from a dense boundary sample (accurate to ~1e-6)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.kind == "disk":
            return np.abs(self.radius - np.abs(z))
        pts = self.point(np.linspace(0, 2 * np.pi, _DENSE, endpoint=False))
        flat = z.ravel()
        d = np.empty(flat.shape)
        for k in range(0, flat.size, _BLOCK):  # bounded memory for large point sets
            d[k:k + _BLOCK] = np.abs(flat[k:k + _BLOCK, None] - pts[None, :]).min(axis=1)
        return d.reshape(z.shape)

    def area(self) -> float:
        # int rho^2/2 dtheta, exact for trigonometric polynomials
        a, b = self.cos_coeffs, self.sin_coeffs
        return float(np.pi * (a[0] ** 2 + 0.5 * np.sum(a[1:] ** 2 + b[1:] ** 2)))

    def rho_range(self) -> tuple[float, float]:
        r = self.rho(np.linspace(0, 2 * np.pi, _DENSE, endpoint=False))
        return float(r.min()), float(r.max())

    def as_star(self) -> "Domain2D":
        return Domain2D("star", self.cos_coeffs.copy(), self.sin_coeffs.copy())

    def same_as(self, other: "Domain2D") -> bool:
        a1, b1 = _pad(self.cos_coeffs, self.sin_coeffs)
        a2, b2 = _pad(other.cos_coeffs, other.sin_coeffs)
        n = max(len(a1), len(a2))
        return bool(
            np.array_equal(np.pad(a1, (0, n - len(a1))), np.pad(a2, (0, n - len(a2))))
            and np.array_equal(np.pad(b1, (0, n - len(b1))), np.pad(b2, (0, n - len(b2))))
        )

    def __repr__(self) -> str:
        if self.kind == "disk":
            return f"Domain2D(disk, R={self.radius:g})"
        return f"Domain2D(star, a={self.cos_coeffs.tolist()}, b={self.sin_coeffs.tolist()})"


def build_disk(R: float) -> Domain2D:
    if not np.isfinite(R) or R <= 0:
        raise DomainError(f"disk radius must be positive, got {R}")
    return Domain2D("disk", np.array([float(R)]), np.zeros(1))


def build_star(cos_coeffs, sin_coeffs=None) -> Domain2D:
    """Star domain from cosine/sine coefficients; rejects ``rho <= 0`` anywhere."""
    a, b = _pad(cos_coeffs, sin_coeffs)
    theta = np.linspace(0, 2 * np.pi, _DENSE, endpoint=False)
    r = _trig_eval(a, b, theta)
    if np.min(r) <= 0:
        raise DomainError(f"boundary radius is not positive (min rho = {np.min(r):.6g})")
    return Domain2D("star", a, b)


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Theta-uniform boundary nodes with outward normals and arclength weights."""

    theta: np.ndarray
    nodes: np.ndarray  # complex positions
    normals: np.ndarray  # complex unit outward normals
    ds: np.ndarray  # arclength weights (trapezoid rule)

    @property
    def N(self) -> int:
        return len(self.theta)

    @property
    def tangents(self) -> np.ndarray:
        return 1j * self.normals

    def length(self) -> float:
        return float(self.ds.sum())

    def integrate(self, values) -> float:
        return float(np.sum(np.asarray(values) * self.ds))


def boundary_mesh(d: Domain2D, N: int) -> BoundaryMesh:
    if N < 4:
        raise DomainError("boundary mesh needs at least 4 nodes")
    theta = 2 * np.pi * np.arange(N) / N
    rho, drho = d.rho(theta), d.drho(theta)
    e = np.exp(1j * theta)
    dz = (drho + 1j * rho) * e  # d zeta / d theta
    speed = np.abs(dz)
    normals = -1j * dz / speed  # counterclockwise boundary: rotate tangent by -90 deg
    return BoundaryMesh(theta, rho * e, normals, speed * (2 * np.pi / N))


@dataclass(frozen=True, eq=False)
class BoundaryPerturbation:
    """Normal displacement profile ``p(theta)`` as a trigonometric polynomial.

    ``strict`` enforces ``p > 0``; with ``strict=False`` only ``p >= 0`` is
    required.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    strict: bool = True

    def __post_init__(self):
        a, b = _pad(self.cos_coeffs, self.sin_coeffs)
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)
        pmin = float(self(np.linspace(0, 2 * np.pi, _DENSE, endpoint=False)).min())
        if pmin <= 0 if self.strict else pmin < 0:
            raise DomainError(f"perturbation profile must be positive (min p = {pmin:.6g})")

    @classmethod
    def constant(cls, c: float) -> "BoundaryPerturbation":
        return cls(np.array([float(c)]), np.zeros(1))

    def __call__(self, theta):
        return _trig_eval(self.cos_coeffs, self.sin_coeffs, theta)

    def on(self, mesh: BoundaryMesh) -> np.ndarray:
        return self(mesh.theta)

    @property
    def degree(self) -> int:
        nz = np.nonzero(np.abs(self.cos_coeffs) + np.abs(self.sin_coeffs))[0]
        return int(nz[-1]) if len(nz) else 0

    @property
    def is_constant(self) -> bool:
        return self.degree == 0


def moved_points(d: Domain2D, p: BoundaryPerturbation, eps: float, theta) -> np.ndarray:
    """Boundary points ``zeta(theta) + eps * p(theta) * n(theta)``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    rho, drho = d.rho(theta), d.drho(theta)
    e = np.exp(1j * theta)
    dz = (drho + 1j * rho) * e
    n = -1j * dz / np.abs(dz)
    return rho * e + eps * p(theta) * n


def perturb(d: Domain2D, p: BoundaryPerturbation, eps: float, degree: int | None = None) -> Domain2D:
    """Move the boundary of ``d`` along its outward normal by ``eps * p``.

    The moved curve is refit as a star domain with a trigonometric polynomial
    of ``degree`` (default: ``d.degree + p.degree + 4``).
    """
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if eps == 0:
        return d
    if d.kind == "disk" and p.is_constant:
        return build_disk(d.radius + eps * float(p.cos_coeffs[0]))
    deg = d.degree + p.degree + 4 if degree is None else int(degree)
    M = max(512, 16 * (deg + 1))
    theta = 2 * np.pi * np.arange(M) / M
    pts = moved_points(d, p, eps, theta)
    phi = np.unwrap(np.angle(pts))
    if np.any(np.diff(phi) <= 0) or phi[-1] - phi[0] >= 2 * np.pi:
        raise DomainError("perturbed boundary is not a graph over the polar angle")
    r = np.abs(pts)
    k = np.arange(deg + 1)
    A = np.hstack([np.cos(np.outer(phi, k)), np.sin(np.outer(phi, k[1:]))])
    sol, *_ = np.linalg.lstsq(A, r, rcond=None)
    a = sol[: deg + 1]
    b = np.concatenate([[0.0], sol[deg + 1 :]])
    try:
        return build_star(a, b)
    except DomainError as exc:
        raise DomainError(f"perturbed boundary rejected: {exc}") from None
