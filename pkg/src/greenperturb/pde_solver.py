"""Finite-difference Dirichlet solver and numerical Green functions.

The grid is Cartesian with spacing ``h`` and nodes at integer multiples of
``h``; nodes strictly inside the domain are unknowns.  The Laplacian uses the
Shortley-Weller stencil, whose legs are shortened to end on the boundary
wherever a neighbour lies outside.

Green functions are split as ``g_w = Phi_w + h_w`` with
``Phi_w(z) = log|z - w| / (2 pi)`` handled in closed form and the harmonic
correction ``h_w`` solved on the grid with boundary data ``-Phi_w``.
"""
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels
from .domain import Domain2D, BoundaryMesh
from .fields import ScalarFunction

__all__ = [
    "SolverError",
    "ResonanceError",
    "Grid",
    "FieldGrid",
    "NumericGreen",
    "get_grid",
    "solve_dirichlet",
    "green_numeric",
    "normal_derivative_numeric",
    "green_helmholtz_numeric",
    "green_schrodinger_numeric",
    "green_beltrami_numeric",
    "beltrami_potential",
    "gradient_numeric",
    "discrete_T_norm",
    "log_cell_average",
]

TWO_PI = 2.0 * np.pi
DEFAULT_H = 1.0 / 128
SOLVER_TOL = 1e-10
FIT_RADIUS = 3.0  # in units of h
FIT_DEGREE = 3
MAX_FACTORS = 3  # cached factorisations per grid
GRID_NODE_BUDGET = 400_000  # interior nodes kept across cached grids

# E, W, N, S
_DIRS = np.array([1.0, -1.0, 1j, -1j])
_DI = (0, 0, 1, -1)
_DJ = (1, -1, 0, 0)


class SolverError(RuntimeError):
    """Linear solve failed or did not reach the residual tolerance."""


class ResonanceError(SolverError):
    """Requested shift is too close to the Dirichlet spectrum."""


def _phi(z, w):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(np.asarray(z) - w)) / TWO_PI


def _grad_phi(z, w):
    d = np.asarray(z, dtype=complex) - w
    return d / (TWO_PI * np.abs(d) ** 2)


def log_cell_average(center, w, hx, hy=None):
    """Mean of ``Phi_w`` over the axis-aligned cell centred at ``center``."""
    hy = hx if hy is None else hy
    d = np.asarray(center, dtype=complex) - w
    return kernels.rect_log_mean(d.real, d.imag, hx, hy) / TWO_PI


class Grid:
    """Masked Cartesian grid with Shortley-Weller legs for one domain."""

    def __init__(self, domain: Domain2D, h: float = DEFAULT_H):
        if h <= 0:
            raise ValueError("grid spacing must be positive")
        self.domain = domain
        self.h = float(h)
        _, rmax = domain.rho_range()
        n = int(math.ceil(rmax / h)) + 2
        ks = np.arange(-n, n + 1)
        self.x0 = self.y0 = -n * self.h
        self.nx = self.ny = len(ks)
        X, Y = np.meshgrid(ks * self.h, ks * self.h)
        self.Z = X + 1j * Y
        self.mask = domain.contains(self.Z)
        self.index = np.full(self.mask.shape, -1, dtype=np.int64)
        ii, jj = np.nonzero(self.mask)
        self.ii, self.jj = ii, jj
        self.index[ii, jj] = np.arange(len(ii))
        self.nodes = self.Z[ii, jj]
        self.n = len(ii)
        self.frac = np.ones((4,) + self.mask.shape)
        for k in range(4):
            ni, nj = ii + _DI[k], jj + _DJ[k]
            out = ~self.mask[ni, nj]
            if np.any(out):
                p = self.nodes[out]
                u = np.full(out.sum(), _DIRS[k])
                t = kernels.star_crossings(p.real, p.imag, u.real, u.imag, self.h,
                                           domain.cos_coeffs, domain.sin_coeffs)
                self.frac[k, ii[out], jj[out]] = t
        rows, cols, vals, diag, brow, bdir, bcoef = kernels.sw_assemble(self.index, self.frac, self.h)
        n_ = self.n
        self.A = sp.csc_matrix(
            (np.concatenate([vals, diag]),
             (np.concatenate([rows, np.arange(n_)]), np.concatenate([cols, np.arange(n_)]))),
            shape=(n_, n_),
        )
        self.brow, self.bcoef = brow, bcoef
        bnode = self.nodes[brow]
        bi, bj = ii[brow], jj[brow]
        self.bpoints = bnode + self.frac[bdir, bi, bj] * self.h * _DIRS[bdir]
        self._lu: OrderedDict = OrderedDict()
        self._fits: dict = {}
        self._lock = threading.Lock()

    # ---- linear algebra -------------------------------------------------
    def operator(self, shift=None):
        if shift is None:
            return self.A
        return self.A - sp.diags(np.broadcast_to(shift, (self.n,)).astype(float))

    def factor(self, shift=None, key=None):
        k = "laplace" if shift is None else key
        with self._lock:
            lu = self._lu.get(k) if k is not None else None
            if lu is not None:
                self._lu.move_to_end(k)
        if lu is None:
            try:
                lu = spla.splu(sp.csc_matrix(self.operator(shift)))
            except RuntimeError as exc:
                raise SolverError(f"factorisation failed on {self.n} unknowns (h={self.h:g}): {exc}") from None
            if k is not None:
                with self._lock:
                    self._lu[k] = lu
                    while len(self._lu) > MAX_FACTORS:
                        self._lu.popitem(last=False)
        return lu

    def boundary_rhs(self, bvals):
        """Contribution of Dirichlet data to the right-hand side."""
        if bvals is None:
            return np.zeros(self.n)
        b = np.zeros(self.n)
        vals = bvals(self.bpoints) if callable(bvals) else np.broadcast_to(bvals, self.bpoints.shape)
        np.add.at(b, self.brow, self.bcoef * vals)
        return b

    # ---- geometry helpers ---------------------------------------------
    def locate(self, z):
        z = np.asarray(z, dtype=complex)
        j = np.floor((z.real - self.x0) / self.h).astype(int)
        i = np.floor((z.imag - self.y0) / self.h).astype(int)
        return i, j

    def nearest_node(self, z):
        z = complex(z)
        j = int(round((z.real - self.x0) / self.h))
        i = int(round((z.imag - self.y0) / self.h))
        return i, j

    def is_interior(self, i, j):
        i, j = np.asarray(i), np.asarray(j)
        ok = (i >= 0) & (i < self.ny) & (j >= 0) & (j < self.nx)
        res = np.zeros(i.shape, dtype=bool)
        res[ok] = self.mask[i[ok], j[ok]]
        return res

    def fit_weights(self, center):
        """Linear functionals for value and gradient at ``center`` from a
        least-squares cubic through nearby nodes and boundary crossings.

        Returns ``(node_indices, boundary_points, W)`` with ``W`` of shape
        ``(3, n_nodes + n_boundary)``: rows give value, d/dx, d/dy.
        """
        center = complex(center)
        with self._lock:
            hit = self._fits.get(center)
        if hit is not None:
            return hit
        ncoef = (FIT_DEGREE + 1) * (FIT_DEGREE + 2) // 2
        ci, cj = self.nearest_node(center)
        r = FIT_RADIUS * self.h
        while True:
            m = int(r / self.h) + 1
            si = slice(max(ci - m, 0), min(ci + m + 1, self.ny))
            sj = slice(max(cj - m, 0), min(cj + m + 1, self.nx))
            sub_idx = self.index[si, sj]
            sel = (sub_idx >= 0) & (np.abs(self.Z[si, sj] - center) <= r)
            if sel.sum() >= 2 * ncoef or r > 4 * FIT_RADIUS * self.h:
                break
            r += 0.5 * self.h
        nodes = sub_idx[sel]
        bpts = self.bpoints[np.abs(self.bpoints - center) <= r]
        if len(bpts):
            _, uniq = np.unique(np.round(bpts, 12), return_index=True)
            bpts = bpts[np.sort(uniq)]
        d = (np.concatenate([self.nodes[nodes], bpts]) - center) / self.h
        x, y = d.real, d.imag
        cols = [np.ones_like(x), x, y]
        for deg in range(2, FIT_DEGREE + 1):
            for a in range(deg, -1, -1):
                cols.append(x**a * y ** (deg - a))
        V = np.stack(cols, axis=1)
        if len(d) < V.shape[1] + 2:
            raise SolverError(f"too few points for a local fit at {center} ({len(d)})")
        pinv = np.linalg.pinv(V)
        W = pinv[:3] / np.array([1.0, self.h, self.h])[:, None]
        out = (nodes, bpts, W)
        with self._lock:
            if len(self._fits) > 200000:
                self._fits.clear()
            self._fits[center] = out
        return out

    def interpolation_operator(self, points):
        """Linear map from (node values, boundary data) to values at ``points``.

        Returns ``(P, B, bpts)``: ``f(points) = P @ u + B @ bvals(bpts)`` for a
        grid function ``u`` with Dirichlet data ``bvals``.  Bilinear weights are
        used where the four surrounding nodes are interior; a local cubic fit
        otherwise.
        """
        points = np.atleast_1d(np.asarray(points, dtype=complex))
        i, j = self.locate(points)
        ok = np.ones(points.shape, dtype=bool)
        for di in (0, 1):
            for dj in (0, 1):
                ok &= self.is_interior(i + di, j + dj)
        rows, cols, vals = [], [], []
        brows, bvals_w, bpts = [], [], []
        k_ok = np.nonzero(ok)[0]
        tx = (points[k_ok].real - (self.x0 + j[k_ok] * self.h)) / self.h
        ty = (points[k_ok].imag - (self.y0 + i[k_ok] * self.h)) / self.h
        for di, dj, w in ((0, 0, (1 - tx) * (1 - ty)), (0, 1, tx * (1 - ty)),
                          (1, 0, (1 - tx) * ty), (1, 1, tx * ty)):
            rows.append(k_ok)
            cols.append(self.index[i[k_ok] + di, j[k_ok] + dj])
            vals.append(w)
        nb = 0
        for k in np.nonzero(~ok)[0]:
            nodes, bp, W = self.fit_weights(points[k])
            rows.append(np.full(len(nodes), k))
            cols.append(nodes)
            vals.append(W[0, : len(nodes)])
            brows.append(np.full(len(bp), k))
            bvals_w.append(W[0, len(nodes):])
            bpts.append(bp)
            nb += len(bp)
        P = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(len(points), self.n))
        if nb:
            bpts_all = np.concatenate(bpts)
            B = sp.csr_matrix((np.concatenate(bvals_w), (np.concatenate(brows), np.arange(nb))),
                              shape=(len(points), nb))
        else:
            bpts_all = np.zeros(0, dtype=complex)
            B = sp.csr_matrix((len(points), 0))
        return P, B, bpts_all

    def boundary_scatter(self):
        """Sparse ``(n, n_legs)`` matrix mapping boundary data to the right-hand side."""
        return sp.csr_matrix((self.bcoef, (self.brow, np.arange(len(self.brow)))),
                             shape=(self.n, len(self.brow)))

    def diagnostics(self) -> str:
        return (f"grid h={self.h:g}, {self.n} interior nodes, {len(self.brow)} boundary legs, "
                f"min leg fraction {self.frac.min():.3g}")


_GRIDS: OrderedDict = OrderedDict()
_GRIDS_LOCK = threading.Lock()


def get_grid(domain: Domain2D, h: float = DEFAULT_H) -> Grid:
    """Cached :class:`Grid` per (domain geometry, h)."""
    key = (domain.kind, tuple(domain.cos_coeffs), tuple(domain.sin_coeffs), float(h))
    with _GRIDS_LOCK:
        g = _GRIDS.get(key)
        if g is not None:
            _GRIDS.move_to_end(key)
    if g is None:
        g = Grid(domain, h)
        with _GRIDS_LOCK:
            g = _GRIDS.setdefault(key, g)
            # least recently used grids go first, the newest always stays
            while len(_GRIDS) > 1 and sum(x.n for x in _GRIDS.values()) > GRID_NODE_BUDGET:
                _GRIDS.popitem(last=False)
    return g


@dataclass(eq=False)
class FieldGrid:
    """Grid function on interior nodes, with its Dirichlet data for
    evaluations close to the boundary."""

    grid: Grid
    values: np.ndarray
    bvals: object = None  # callable on complex boundary points, scalar, or None (zero)

    def boundary_values(self, pts):
        if self.bvals is None:
            return np.zeros(np.shape(pts))
        if callable(self.bvals):
            return self.bvals(pts)
        return np.full(np.shape(pts), float(self.bvals))

    def node(self, i, j):
        return self.values[self.grid.index[i, j]]

    def __call__(self, z):
        return self._eval(z, grad=False)

    def grad(self, z):
        """Gradient as complex ``fx + i fy``."""
        return self._eval(z, grad=True)

    def _eval(self, z, grad):
        z = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(z).ravel()
        out = np.empty(flat.shape, dtype=complex if grad else float)
        g = self.grid
        i, j = g.locate(flat)
        need = 2 if grad else 1
        # bilinear needs the four corners (plus one more ring for centred differences)
        ok = np.ones(flat.shape, dtype=bool)
        for di in range(1 - need, 1 + need):
            for dj in range(1 - need, 1 + need):
                ok &= g.is_interior(i + di, j + dj)
        if np.any(ok):
            out[ok] = self._bilinear(flat[ok], i[ok], j[ok], grad)
        for k in np.nonzero(~ok)[0]:
            out[k] = self._fit_eval(flat[k], grad)
        return out.reshape(z.shape) if z.ndim else out[0]

    def _bilinear(self, z, i, j, grad):
        g = self.grid
        tx = (z.real - (g.x0 + j * g.h)) / g.h
        ty = (z.imag - (g.y0 + i * g.h)) / g.h
        idx = g.index
        v = self.values

        def f(ii, jj):
            if not grad:
                return v[idx[ii, jj]]
            gx = (v[idx[ii, jj + 1]] - v[idx[ii, jj - 1]]) / (2 * g.h)
            gy = (v[idx[ii + 1, jj]] - v[idx[ii - 1, jj]]) / (2 * g.h)
            return gx + 1j * gy

        return ((1 - tx) * (1 - ty) * f(i, j) + tx * (1 - ty) * f(i, j + 1)
                + (1 - tx) * ty * f(i + 1, j) + tx * ty * f(i + 1, j + 1))

    def _fit_eval(self, center, grad=False):
        nodes, bpts, W = self.grid.fit_weights(center)
        data = np.concatenate([self.values[nodes], self.boundary_values(bpts)])
        if grad:
            return (W[1] @ data) + 1j * (W[2] @ data)
        return W[0] @ data

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _as_node_values(grid: Grid, f) -> np.ndarray:
    if f is None:
        return np.zeros(grid.n)
    if isinstance(f, FieldGrid):
        return f.values
    if callable(f):
        return np.broadcast_to(np.asarray(f(grid.nodes.real, grid.nodes.imag), dtype=float),
                               (grid.n,)).copy()
    return np.broadcast_to(np.asarray(f, dtype=float), (grid.n,)).copy()


def solve_dirichlet(grid: Grid, rhs=None, bvals=None, shift=None, shift_key=None) -> FieldGrid:
    """Solve ``(Delta - shift) u = rhs`` in the domain with ``u = bvals`` on the boundary.

    Parameters
    ----------
    rhs : array of node values, callable ``f(x, y)``, scalar, or None
    bvals : callable on complex boundary points, scalar, or None (zero data)
    shift : optional node values of a multiplicative potential
    shift_key : hashable key to cache the factorisation of a shifted operator
    """
    f = _as_node_values(grid, rhs)
    if not np.all(np.isfinite(f)):
        raise SolverError("right-hand side is not finite")
    b = f - grid.boundary_rhs(bvals)
    lu = grid.factor(shift, key=shift_key)
    u = lu.solve(b)
    M = grid.operator(shift)
    res = np.max(np.abs(M @ u - b)) / max(np.max(np.abs(b)), 1.0)
    if not np.isfinite(res) or res > SOLVER_TOL:
        raise SolverError(f"residual {res:.3e} exceeds {SOLVER_TOL:g}; {grid.diagnostics()}")
    return FieldGrid(grid, u, bvals)


@dataclass(eq=False)
class NumericGreen:
    """Numerical Green function ``g(z) = (Phi_w(z) + S(z)) / sqrt(lambda(z) lambda(w))``.

    ``smooth`` holds ``S``, which equals ``-Phi_w`` on the boundary;
    ``weight`` is the conductivity ``lambda`` (``None`` means 1).
    """

    pole: complex
    smooth: FieldGrid
    weight: ScalarFunction | None = None

    @property
    def grid(self) -> Grid:
        return self.smooth.grid

    def _scale(self, z):
        if self.weight is None:
            return 1.0
        return 1.0 / np.sqrt(self.weight.at(z) * self.weight.at(self.pole))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return (_phi(z, self.pole) + self.smooth(z)) * self._scale(z)

    def grad(self, z):
        z = np.asarray(z, dtype=complex)
        base = _grad_phi(z, self.pole) + self.smooth.grad(z)
        if self.weight is None:
            return base
        lam = self.weight.at(z)
        gx, gy = self.weight.grad(z.real, z.imag)
        val = _phi(z, self.pole) + self.smooth(z)
        return (base - val * (gx + 1j * gy) / (2 * lam)) * self._scale(z)

    def node_values(self, cell_average_pole: bool = True) -> np.ndarray:
        """Values at interior nodes; the node whose cell holds the pole gets
        the cell average of the log part."""
        g = self.grid
        phi = _phi(g.nodes, self.pole)
        if cell_average_pole:
            i, j = g.nearest_node(self.pole)
            k = g.index[i, j]
            if k >= 0:
                phi[k] = log_cell_average(g.nodes[k], self.pole, g.h)
        return (phi + self.smooth.values) * self._scale(g.nodes)

    def normal_derivative(self, zeta, normal):
        """Outward normal derivative at boundary points ``zeta``."""
        zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
        normal = np.broadcast_to(np.asarray(normal, dtype=complex), zeta.shape)
        dphi = np.real(np.conj(_grad_phi(zeta, self.pole)) * normal)
        ds = np.empty(zeta.shape)
        for k, (c, n) in enumerate(zip(zeta, normal)):
            gvec = self.smooth._fit_eval(c, grad=True)
            ds[k] = np.real(np.conj(gvec) * n)
        # Phi + S vanishes on the boundary, so the weight only rescales
        return (dphi + ds) * self._scale(zeta)


def _check_pole(grid: Grid, w, min_dist: float = 4.0) -> None:
    w = complex(w)
    if not grid.domain.contains(w):
        raise ValueError(f"pole {w} is not inside the domain")
    dist = float(grid.domain.boundary_distance(w)[0])
    if dist < min_dist * grid.h:
        raise ValueError(f"pole {w} is {dist:.3g} from the boundary; "
                         f"need >= {min_dist:g}h = {min_dist * grid.h:.3g}")


def green_numeric(d: Domain2D, w, h: float = DEFAULT_H, min_dist: float = 4.0) -> NumericGreen:
    """Green function of the Laplacian with pole ``w`` by singularity splitting.

    The pole must be at least ``min_dist * h`` from the boundary.
    """
    grid = get_grid(d, h)
    _check_pole(grid, w, min_dist)
    w = complex(w)
    corr = solve_dirichlet(grid, None, lambda z: -_phi(z, w))
    return NumericGreen(w, corr)


def normal_derivative_numeric(ng: NumericGreen, mesh: BoundaryMesh):
    """Harmonic-measure density ``dg/dn(zeta, w)`` at the nodes of ``mesh``."""
    return ng.normal_derivative(mesh.nodes, mesh.normals)


def discrete_T_norm(grid: Grid, tol: float = 1e-8, maxiter: int = 500) -> float:
    """``1 / lambda_1`` of the discrete Dirichlet Laplacian by inverse iteration."""
    lu = grid.factor()
    x = np.ones(grid.n)
    x /= np.linalg.norm(x)
    prev = 0.0
    for _ in range(maxiter):
        y = lu.solve(x)
        est = abs(float(x @ y))
        x = y / np.linalg.norm(y)
        if abs(est - prev) <= tol * est:
            return est
        prev = est
    raise SolverError("inverse iteration for the Dirichlet spectrum did not converge")


def _shifted_green(d: Domain2D, q_nodes: np.ndarray, w, h, key=None) -> NumericGreen:
    grid = get_grid(d, h)
    ng = green_numeric(d, w, h)
    qmax = float(np.max(np.abs(q_nodes))) if len(q_nodes) else 0.0
    if qmax == 0.0:
        return ng
    tn = discrete_T_norm(grid)
    if qmax * tn >= 0.9:
        raise ResonanceError(f"|q|*||T|| = {qmax * tn:.3f} >= 0.9; too close to resonance")
    rhs = q_nodes * ng.node_values(cell_average_pole=True)
    v = solve_dirichlet(grid, rhs, None, shift=q_nodes, shift_key=key)
    total = FieldGrid(grid, ng.smooth.values + v.values, ng.smooth.bvals)
    return NumericGreen(ng.pole, total)


def green_helmholtz_numeric(d: Domain2D, a: float, w, h: float = DEFAULT_H) -> NumericGreen:
    """Green function of ``Delta - a``: ``g_w + v`` with ``(Delta - a) v = a g_w``, ``v = 0`` on the boundary."""
    grid = get_grid(d, h)
    return _shifted_green(d, np.full(grid.n, float(a)), w, h, key=("const", float(a)))


def green_schrodinger_numeric(d: Domain2D, q, w, h: float = DEFAULT_H, key=None) -> NumericGreen:
    """Green function of ``Delta - q`` for a potential ``q`` (callable ``q(x, y)`` or scalar)."""
    grid = get_grid(d, h)
    qn = _as_node_values(grid, q)
    if key is None and np.all(qn == qn[0]):
        key = ("const", float(qn[0]))
    return _shifted_green(d, qn, w, h, key=key)


def beltrami_potential(lam: ScalarFunction):
    """``u = lambda^{-1/2} Delta lambda^{1/2} = Delta lambda/(2 lambda) - |grad lambda|^2/(4 lambda^2)``."""

    def u(x, y):
        L = lam(x, y)
        gx, gy = lam.grad(x, y)
        return lam.laplacian(x, y) / (2 * L) - (gx * gx + gy * gy) / (4 * L * L)

    return u


def green_beltrami_numeric(d: Domain2D, lam: ScalarFunction, w, h: float = DEFAULT_H, u=None) -> NumericGreen:
    """Green function of ``div(lambda grad)`` through the Schrodinger reduction.

    ``u`` defaults to the exact potential from :func:`beltrami_potential`.
    """
    grid = get_grid(d, h)
    lv = lam(grid.nodes.real, grid.nodes.imag)
    bl = lam.at(grid.bpoints)
    if np.min(lv) <= 0 or np.min(bl) <= 0:
        raise ValueError("conductivity must be positive on the domain")
    pot = beltrami_potential(lam) if u is None else u
    base = green_schrodinger_numeric(d, pot, w, h)
    return NumericGreen(base.pole, base.smooth, lam)


def gradient_numeric(f, z):
    """Gradient (complex ``fx + i fy``) of a :class:`FieldGrid` or :class:`NumericGreen`."""
    return f.grad(z)
