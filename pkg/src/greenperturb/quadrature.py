"""Area quadrature for integrands with isolated integrable singularities.

A smooth partition of unity splits the integrand into pieces supported on
small disks around each singular point and a remainder that vanishes near
them.  Each local piece is integrated in polar coordinates centred on its
singular point (where ``r dr`` absorbs ``1/r`` and ``log r`` behaviour), and
the remainder on a polar-mapped Gauss x trapezoid grid of the whole domain.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .domain import Domain2D

__all__ = ["bump", "local_radius", "singular_area_integral"]

_LOCAL = (64, 64)


def _psi(t):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)


def bump(r, rc: float):
    """C-infinity cutoff: 1 for ``r <= rc/2``, 0 for ``r >= rc``."""
    x = np.clip(2.0 * np.asarray(r, dtype=float) / rc - 1.0, 0.0, 1.0)
    a, b = _psi(x), _psi(1.0 - x)
    return 1.0 - a / (a + b)


def local_radius(domain: Domain2D, centers, cap: float = 0.3) -> np.ndarray:
    """Cutoff radius per centre: disjoint disks that stay inside the domain."""
    c = np.atleast_1d(np.asarray(centers, dtype=complex))
    dist = domain.boundary_distance(c)
    rc = np.minimum(0.9 * dist, cap * domain.rho_range()[1])
    for k in range(len(c)):
        others = np.delete(c, k)
        if len(others):
            rc[k] = min(rc[k], 0.45 * float(np.min(np.abs(others - c[k]))))
    if np.any(rc <= 0):
        raise ValueError("singular points must be distinct interior points")
    return rc


def _gauss01(n):
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def singular_area_integral(domain: Domain2D, F, centers, local=_LOCAL, far=None):
    """``int_D F dA`` for ``F`` singular (integrably) at ``centers``.

    Parameters
    ----------
    domain : Domain2D
    F : callable mapping a complex array of points to real values
    centers : singular points, distinct and interior
    local : (radial Gauss nodes, angular nodes) per local disk
    far : (radial Gauss nodes, angular nodes) for the remainder; chosen
        from the smallest cutoff radius when omitted

    Returns
    -------
    value : float
    npoints : int
        Total number of integrand evaluations.
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=complex))
    rcs = local_radius(domain, centers) if len(centers) else np.array([])
    total = 0.0
    npts = 0

    # local disks, r = rc t^2 smooths log/1-over-r behaviour at the centre
    t, wt = _gauss01(local[0])
    nphi = local[1]
    phi = 2 * np.pi * np.arange(nphi) / nphi
    for c, rc in zip(centers, rcs):
        r = rc * t * t
        jac = 2 * rc * t * r * wt  # dr = 2 rc t dt, area element r dr
        pts = c + np.multiply.outer(r, np.exp(1j * phi))
        vals = np.asarray(F(pts.ravel()), dtype=float).reshape(pts.shape)
        total += float(np.sum(bump(r, rc)[:, None] * vals * jac[:, None])) * (2 * np.pi / nphi)
        npts += pts.size

    # remainder on the polar-mapped domain
    if far is None:
        rmin = float(rcs.min()) if len(rcs) else 1.0
        scale = domain.rho_range()[1]
        ns = int(np.clip(np.ceil(48 * scale / rmin), 64, 600))
        nt = int(np.clip(np.ceil(96 * np.pi * scale / rmin), 256, 4096))
        far = (ns, nt)
    s, ws = _gauss01(far[0])
    nt = far[1]
    theta = 2 * np.pi * np.arange(nt) / nt
    rho = domain.rho(theta)
    pts = np.multiply.outer(s, rho * np.exp(1j * theta))
    jac = np.multiply.outer(s * ws, rho * rho) * (2 * np.pi / nt)
    cut = np.ones(pts.shape)
    for c, rc in zip(centers, rcs):
        cut -= bump(np.abs(pts - c), rc)
    live = cut > 0
    vals = np.zeros(pts.shape)
    vals[live] = np.asarray(F(pts[live]), dtype=float)
    total += float(np.sum(cut * vals * jac))
    npts += int(live.sum())
    return total, npts
