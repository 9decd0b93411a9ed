"""Green-function evaluation backends shared by the operator and variation code.

``AnalyticDiskBackend`` uses the closed form for disks; ``NumericBackend``
solves one singularity-split problem per pole on a grid and caches it.
"""
from __future__ import annotations

import threading

import numpy as np

from . import disk_analytic as da
from . import kernels
from .domain import BoundaryMesh, Domain2D
from .fields import ScalarFunction
from .pde_solver import (
    DEFAULT_H,
    NumericGreen,
    get_grid,
    green_beltrami_numeric,
    green_numeric,
)

__all__ = ["AnalyticDiskBackend", "NumericBackend", "backend_for"]

TWO_PI = 2.0 * np.pi


def _phi(z, w):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.asarray(z) - w)) / TWO_PI


class AnalyticDiskBackend:
    """Closed-form Green function of a disk centred at the origin."""

    name = "analytic"
    log_coefficient = 1.0 / TWO_PI

    def __init__(self, domain: Domain2D):
        if domain.kind != "disk":
            raise ValueError("analytic backend requires a disk")
        self.domain = domain
        self.R = domain.radius

    def value(self, z, w):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return (np.log(np.abs(z - w)) - np.log(np.abs(self.R**2 - z * np.conj(w)) / self.R)) / TWO_PI

    def smooth(self, z, w):
        """``g(z, w) - log|z - w| / (2 pi)``."""
        z = np.asarray(z, dtype=complex)
        return -np.log(np.abs(self.R**2 - z * np.conj(w)) / self.R) / TWO_PI

    def grad(self, z, w):
        return da.green_disk_grad(self.R, z, w)

    def density(self, w, mesh: BoundaryMesh):
        return da.normal_derivative_disk(self.R, mesh.nodes, w)

    def matrix(self, targets, sources):
        return kernels.disk_kernel(targets, sources, self.R)

    def smooth_matrix(self, targets, sources):
        t = np.atleast_1d(np.asarray(targets, dtype=complex))[:, None]
        s = np.atleast_1d(np.asarray(sources, dtype=complex))[None, :]
        return self.smooth(t, s)


class NumericBackend:
    """Grid Green functions, one cached solve per pole.

    With ``weight`` set, the Green function is that of ``div(weight grad)``.
    """

    name = "numeric"

    def __init__(self, domain: Domain2D, h: float = DEFAULT_H, weight: ScalarFunction | None = None):
        self.domain = domain
        self.h = float(h)
        self.weight = weight
        self.grid = get_grid(domain, h)
        self._cache: dict[complex, NumericGreen] = {}
        self._lock = threading.Lock()

    @property
    def log_coefficient(self):
        return 1.0 / TWO_PI

    def green(self, w) -> NumericGreen:
        w = complex(w)
        with self._lock:
            ng = self._cache.get(w)
        if ng is None:
            if self.weight is None:
                ng = green_numeric(self.domain, w, self.h)
            else:
                ng = green_beltrami_numeric(self.domain, self.weight, w, self.h)
            with self._lock:
                ng = self._cache.setdefault(w, ng)
        return ng

    def value(self, z, w):
        return self.green(w)(z)

    def smooth(self, z, w):
        ng = self.green(w)
        z = np.asarray(z, dtype=complex)
        if self.weight is None:
            return ng.smooth(z)
        return ng(z) - _phi(z, w) / self.weight.at(w)

    def grad(self, z, w):
        return self.green(w).grad(z)

    def density(self, w, mesh: BoundaryMesh):
        return self.green(w).normal_derivative(mesh.nodes, mesh.normals)

    def matrix(self, targets, sources):
        """Dense ``g(t_i, s_j)``; entries with ``t_i == s_j`` are ``-inf``."""
        targets = np.atleast_1d(np.asarray(targets, dtype=complex))
        sources = np.atleast_1d(np.asarray(sources, dtype=complex))
        return self.smooth_matrix(targets, sources) + _phi(targets[:, None], sources[None, :])

    def smooth_matrix(self, targets, sources):
        """Dense ``g(t_i, s_j) - Phi(t_i - s_j)`` from multi-right-hand-side solves.

        Poles may lie closer to the boundary than :func:`green_numeric`
        allows.
        """
        if self.weight is not None:
            raise NotImplementedError("matrix assembly is only available for the Laplacian")
        targets = np.atleast_1d(np.asarray(targets, dtype=complex))
        sources = np.atleast_1d(np.asarray(sources, dtype=complex))
        g = self.grid
        P, B, bpts = g.interpolation_operator(targets)
        S = g.boundary_scatter()
        lu = g.factor()
        out = np.empty((len(targets), len(sources)))
        for start in range(0, len(sources), 256):
            src = sources[start:start + 256]
            rhs = S @ _phi(g.bpoints[:, None], src[None, :])  # data -Phi, moved to the rhs
            U = lu.solve(np.asarray(rhs))
            res = np.max(np.abs(g.A @ U - rhs)) / max(np.max(np.abs(rhs)), 1.0)
            if res > 1e-10:
                raise RuntimeError(f"multi-pole solve residual {res:.2e}")
            out[:, start:start + len(src)] = P @ U - B @ _phi(bpts[:, None], src[None, :])
        return out


def backend_for(domain: Domain2D, h: float = DEFAULT_H, numeric: bool | None = None):
    """Analytic backend for disks unless ``numeric`` is requested."""
    if numeric is None:
        numeric = domain.kind != "disk"
    if numeric:
        return NumericBackend(domain, h)
    return AnalyticDiskBackend(domain)
