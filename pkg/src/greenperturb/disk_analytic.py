"""Closed-form Green function of a disk and the disk variation formulas.

Convention: ``Delta g_w = delta_w`` with ``g = 0`` on the circle, so
``g(z, w) ~ log|z - w| / (2 pi)`` near the pole and ``g < 0`` inside.
All functions broadcast over numpy arrays of complex points.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "green_disk",
    "green_disk_grad",
    "normal_derivative_disk",
    "hadamard_disk_delta",
    "beltrami_disk_delta",
    "beltrami_disk_delta_origin",
    "disk_poisson_solution",
]

TWO_PI = 2.0 * np.pi


def _check_inside(R, *pts):
    for p in pts:
        if np.any(np.abs(p) >= R):
            raise ValueError(f"points must lie strictly inside the disk of radius {R}")


def green_disk(R, z, w):
    """``g(z, w) = log|R (z - w) / (R^2 - z conj(w))| / (2 pi)``.

    Returns ``-inf`` where ``z == w``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_inside(R, z, w)
    with np.errstate(divide="ignore"):
        val = np.log(np.abs(R * (z - w)) / np.abs(R * R - z * np.conj(w))) / TWO_PI
    return val[()] if val.ndim == 0 else val


def green_disk_grad(R, z, w):
    """Gradient of ``g(., w)`` at ``z``, returned as a complex number ``gx + i gy``.

    ``grad g = 2 conj(dg/dz)`` with ``dg/dz = (1/(4 pi)) (1/(z-w) + conj(w)/(R^2 - z conj(w)))``.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dz = (1.0 / (z - w) + np.conj(w) / (R * R - z * np.conj(w))) / (2.0 * TWO_PI)
    return 2.0 * np.conj(dz)


def normal_derivative_disk(R, zeta, w):
    """Outward normal derivative in the first argument: the Poisson kernel
    ``(R^2 - |w|^2) / (2 pi R |zeta - w|^2)``."""
    zeta = np.asarray(zeta, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) >= R):
        raise ValueError("pole must lie strictly inside the disk")
    return (R * R - np.abs(w) ** 2) / (TWO_PI * R * np.abs(zeta - w) ** 2)


def hadamard_disk_delta(z, w):
    """Variation of the unit-disk Green function under a uniform radius increase."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_inside(1.0, z, w)
    return -(1.0 - np.abs(z * w) ** 2) / (TWO_PI * np.abs(1.0 - z * np.conj(w)) ** 2)


def beltrami_disk_delta(z, w):
    """First variation of the unit-disk Green function for ``lambda = 1 + eps |xi|^2``.

    Valid for ``0 < |z|, |w| < 1`` and ``z != w``; near the diagonal the
    ``z conj(w) log|z - w|`` term makes the value singular.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    _check_inside(1.0, z, w)
    if np.any(z == 0) or np.any(w == 0):
        raise ValueError("z = 0 or w = 0: use beltrami_disk_delta_origin")
    if np.any(z == w):
        raise ValueError("beltrami_disk_delta is singular at z == w")
    zw = z * np.conj(w)
    coef = zw + np.conj(z) / np.conj(w) + w / z - 1.0 / zw
    val = coef * np.log(1.0 - zw) - 2.0 * zw * np.log(np.abs(z - w))
    out = val.real / (2.0 * TWO_PI)
    return out[()] if np.ndim(out) == 0 else out


def beltrami_disk_delta_origin(z):
    """``delta g(z, 0) = (1 - |z|^2) / (4 pi)``."""
    z = np.asarray(z, dtype=complex)
    _check_inside(1.0, z)
    out = (1.0 - np.abs(z) ** 2) / (2.0 * TWO_PI)
    return out[()] if np.ndim(out) == 0 else out


def disk_poisson_solution(R, z):
    """``int_D g(z, xi) dA(xi) = (|z|^2 - R^2) / 4`` (solution of ``Delta u = 1``)."""
    z = np.asarray(z, dtype=complex)
    return (np.abs(z) ** 2 - R * R) / 4.0
