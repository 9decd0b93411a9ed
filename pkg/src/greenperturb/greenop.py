"""The Green integral operator ``T phi(z) = int_D phi(xi) g(z, xi) dA(xi)``.

``T`` is discretised on a polar-mapped midpoint mesh ``xi = s rho(theta)
e^{i theta}``.  The log singularity of the kernel is treated cell-wise: the
cell containing the evaluation point uses the exact mean of
``log|z - xi| / (2 pi)`` over the (locally rectangular) cell plus the smooth
remainder at the cell centre; all other cells use the midpoint value.

On a disk with the analytic backend the kernel matrix is block circulant in
``theta`` and is applied by FFT without being stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .backends import AnalyticDiskBackend, backend_for
from .domain import Domain2D
from .pde_solver import ResonanceError, SolverError

__all__ = [
    "QuadratureMesh",
    "quadrature_mesh",
    "KernelOperator",
    "SeriesResult",
    "apply_T",
    "estimate_T_norm",
    "neumann_series_helmholtz",
    "neumann_series_schrodinger",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class QuadratureMesh:
    """Midpoint cells in ``(s, theta)``; node ``k = i * nt + j``."""

    domain: Domain2D
    ns: int
    nt: int
    s: np.ndarray
    theta: np.ndarray
    rho: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    radial_side: np.ndarray
    tangential_side: np.ndarray

    @property
    def size(self) -> int:
        return self.ns * self.nt

    def locate(self, z) -> np.ndarray:
        """Flat index of the cell containing each point (``-1`` outside)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ang = np.mod(np.angle(z), 2 * np.pi)
        dth = 2 * np.pi / self.nt
        j = np.mod(np.floor(ang / dth + 0.5).astype(int), self.nt)
        # radial position measured along the cell's own ray
        s = np.abs(z) / self.domain.rho(ang)
        i = np.floor(s * self.ns).astype(int)
        out = i * self.nt + j
        out[(i < 0) | (i >= self.ns)] = -1
        out[np.abs(z) < 1e-300] = -1  # origin: all inner cells touch it
        return out


def quadrature_mesh(d: Domain2D, ns: int = 128, nt: int = 256) -> QuadratureMesh:
    ds = 1.0 / ns
    dth = 2 * np.pi / nt
    s = (np.arange(ns) + 0.5) * ds
    theta = np.arange(nt) * dth
    rho = d.rho(theta)
    S, TH = np.meshgrid(s, theta, indexing="ij")
    RHO = np.broadcast_to(rho, S.shape)
    nodes = (S * RHO * np.exp(1j * TH)).ravel()
    weights = (RHO**2 * S * ds * dth).ravel()
    return QuadratureMesh(
        d, ns, nt, s, theta, rho, nodes, weights,
        (RHO * ds).ravel(), (S * RHO * dth).ravel(),
    )


@dataclass
class SeriesResult:
    """Neumann-series evaluation at probe points."""

    values: np.ndarray
    terms: int
    residual_bound: float
    term_norms: list = field(default_factory=list)
    contraction: float = 0.0
    partial_sums: list = field(default_factory=list)


class KernelOperator:
    """Discretised ``T`` for a domain, with a pluggable Green backend.

    Parameters
    ----------
    domain : Domain2D
    backend : optional; analytic for disks, numeric otherwise
    ns, nt : radial and angular cell counts
    """

    def __init__(self, domain: Domain2D, backend=None, ns: int | None = None, nt: int | None = None):
        self.domain = domain
        self.backend = backend if backend is not None else backend_for(domain)
        analytic = isinstance(self.backend, AnalyticDiskBackend)
        ns = ns or (128 if analytic else 20)
        nt = nt or (256 if analytic else 64)
        self.mesh = quadrature_mesh(domain, ns, nt)
        self._norm = None
        self._circulant = None
        self._dense = None
        if analytic:
            self._build_circulant()
        else:
            self._build_dense()

    # ---- kernel assembly --------------------------------------------------
    def _cell_mean(self, z, k):
        """Cell-averaged kernel ``g(z, .)`` over cell ``k`` containing ``z``."""
        m = self.mesh
        frame = np.exp(-1j * m.theta[np.asarray(k) % m.nt])
        d = (np.asarray(z) - m.nodes[k]) * frame
        logpart = kernels.rect_log_mean(d.real, d.imag, m.radial_side[k], m.tangential_side[k]) / TWO_PI
        return logpart + self._smooth(z, k)

    def _smooth(self, z, k):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k = np.atleast_1d(k)
        if isinstance(self.backend, AnalyticDiskBackend):
            return self.backend.smooth(z, self.mesh.nodes[k])
        return np.array([self.backend.smooth_matrix(z[n:n + 1], self.mesh.nodes[k[n]:k[n] + 1])[0, 0]
                         for n in range(len(z))])

    def _build_circulant(self):
        m = self.mesh
        targets = m.nodes[:: m.nt]  # theta = 0 of every ring
        C = self.backend.matrix(targets, m.nodes).reshape(m.ns, m.ns, m.nt)
        rings = np.arange(m.ns)
        self_k = rings * m.nt
        C[rings, rings, 0] = self._cell_mean(targets, self_k)
        C *= m.weights.reshape(m.ns, m.nt)[None, :, :]
        self._circulant = np.conj(np.fft.rfft(C, axis=2))

    def _build_dense(self):
        m = self.mesh
        K = self.backend.smooth_matrix(m.nodes, m.nodes)
        self._asymmetry = float(np.max(np.abs(K - K.T)))
        K = 0.5 * (K + K.T)
        d = m.nodes[:, None] - m.nodes[None, :]
        with np.errstate(divide="ignore"):
            phi = np.log(np.abs(d)) / TWO_PI
        diag = np.arange(m.size)
        zero = np.zeros(m.size)
        phi[diag, diag] = kernels.rect_log_mean(zero, zero, m.radial_side, m.tangential_side) / TWO_PI
        self._kernel = K + phi
        self._dense = self._kernel * m.weights[None, :]

    # ---- evaluation ----------------------------------------------------
    def kernel_rows(self, z) -> np.ndarray:
        """``g(z_p, xi_k) * A_k`` with the containing cell averaged."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if not np.all(self.domain.contains(z)):
            raise ValueError("evaluation points must lie inside the domain")
        m = self.mesh
        if isinstance(self.backend, AnalyticDiskBackend):
            rows = self.backend.matrix(z, m.nodes)
        else:
            rows = self.backend.smooth_matrix(z, m.nodes)
            with np.errstate(divide="ignore"):
                rows = rows + np.log(np.abs(z[:, None] - m.nodes[None, :])) / TWO_PI
        cells = m.locate(z)
        hit = np.nonzero(cells >= 0)[0]
        if len(hit):
            k = cells[hit]
            frame = np.exp(-1j * m.theta[k % m.nt])
            d = (z[hit] - m.nodes[k]) * frame
            logpart = kernels.rect_log_mean(d.real, d.imag, m.radial_side[k], m.tangential_side[k]) / TWO_PI
            rows[hit, k] = logpart + self._smooth(z[hit], k)
        return rows * m.weights[None, :]

    def node_values(self, f) -> np.ndarray:
        """Sample ``f`` (callable ``f(x, y)``, array, or scalar) at mesh nodes."""
        m = self.mesh
        if callable(f):
            return np.broadcast_to(np.asarray(f(m.nodes.real, m.nodes.imag), dtype=float), (m.size,)).copy()
        return np.broadcast_to(np.asarray(f, dtype=float), (m.size,)).copy()

    def green_nodes(self, w) -> np.ndarray:
        """``g(xi_k, w)`` at nodes, cell-averaged in the cell holding ``w``."""
        w = complex(w)
        rows = self.kernel_rows(np.array([w]))[0] / self.mesh.weights
        return rows

    def apply_nodes(self, phi: np.ndarray) -> np.ndarray:
        """``T phi`` at the mesh nodes."""
        m = self.mesh
        phi = np.asarray(phi, dtype=float)
        if self._circulant is not None:
            ph = np.fft.rfft(phi.reshape(m.ns, m.nt), axis=1)
            out = np.einsum("ikm,km->im", self._circulant, ph)
            return np.fft.irfft(out, n=m.nt, axis=1).ravel()
        return self._dense @ phi

    def apply(self, phi: np.ndarray, z) -> np.ndarray:
        """``T phi`` at arbitrary interior points."""
        return self.kernel_rows(z) @ np.asarray(phi, dtype=float)

    def symmetry_defect(self, sample: int = 200, seed: int = 0) -> float:
        """``max |K_ij - K_ji|`` over a deterministic sample of node pairs."""
        rng = np.random.default_rng(seed)
        m = self.mesh
        i = rng.integers(0, m.size, sample)
        j = rng.integers(0, m.size, sample)
        j = np.where(i == j, (j + 1) % m.size, j)
        if self._dense is not None:
            # the stored kernel is symmetrised; report the raw solver asymmetry
            return self._asymmetry
        a = self.backend.value(m.nodes[i], m.nodes[j])
        b = self.backend.value(m.nodes[j], m.nodes[i])
        return float(np.max(np.abs(a - b)))

    @property
    def norm(self) -> float:
        if self._norm is None:
            self._norm = estimate_T_norm(self)
        return self._norm


def apply_T(op: KernelOperator, phi, z):
    """``T phi(z)``; ``phi`` is a callable ``phi(x, y)``, node values, or scalar."""
    vals = phi if isinstance(phi, np.ndarray) and phi.shape == (op.mesh.size,) else op.node_values(phi)
    if not np.any(vals):
        out = np.zeros(np.shape(np.atleast_1d(z)))
        return out if np.ndim(z) else float(out[0])
    out = op.apply(vals, z)
    return out if np.ndim(z) else float(out[0])


def estimate_T_norm(op: KernelOperator, rtol: float = 1e-6, maxiter: int = 500) -> float:
    """Largest singular value of the discretised ``T`` by power iteration.

    ``T`` is self-adjoint in ``L^2``, so the iteration runs on the symmetric
    matrix ``W^{1/2} K W^{1/2}`` (``W`` = cell areas) from a constant start.
    """
    w = op.mesh.weights
    sw = np.sqrt(w)
    x = np.ones(op.mesh.size) / np.sqrt(op.mesh.size)
    prev = None
    for _ in range(maxiter):
        y = sw * op.apply_nodes(x / sw)
        rq = abs(float(x @ y))
        x = y / np.linalg.norm(y)
        if prev is not None and abs(rq - prev) <= rtol * rq:
            op._norm = rq
            return rq
        prev = rq
    raise SolverError(f"power iteration did not converge in {maxiter} iterations")


def _series(op, w, probes, multiplier, max_terms, tol, contraction):
    probes = np.atleast_1d(np.asarray(probes, dtype=complex))
    if np.any(np.abs(probes - complex(w)) < 1e-3):
        raise ValueError("probes must be at least 1e-3 from the pole")
    rows = op.kernel_rows(probes)
    t_nodes = op.green_nodes(w)
    t_probe = op.backend.value(probes, complex(w))
    total = t_probe.copy()
    partial = [total.copy()]
    norms = [float(np.max(np.abs(t_probe)))]
    n = 1
    while n < max_terms and norms[-1] >= tol and multiplier is not None:
        src = multiplier(t_nodes)
        t_probe = rows @ src
        t_nodes = op.apply_nodes(src)
        total = total + t_probe
        partial.append(total.copy())
        norms.append(float(np.max(np.abs(t_probe))))
        n += 1
    bound = norms[-1] * contraction / (1.0 - contraction) if contraction < 1 else np.inf
    return SeriesResult(total, n, bound, norms, contraction, partial)


def neumann_series_helmholtz(op: KernelOperator, a: float, w, probes, max_terms: int = 50,
                             tol: float = 1e-14) -> SeriesResult:
    """``g*_w = sum_n a^n T^n g_w`` for the Green function of ``Delta - a``.

    Iterates ``t_0 = g_w``, ``t_{n+1} = a T t_n`` until the largest probe value
    of a term drops below ``tol`` or ``max_terms`` terms are used.
    """
    a = float(a)
    if a == 0.0:
        return _series(op, w, probes, None, 1, tol, 0.0)
    q = abs(a) * op.norm
    if q >= 1.0:
        raise ResonanceError(f"|a| * ||T|| = {q:.4f} >= 1: series diverges")
    return _series(op, w, probes, lambda t: a * t, max_terms, tol, q)


def neumann_series_schrodinger(op: KernelOperator, p, eps: float, w, probes, max_terms: int = 50,
                               tol: float = 1e-14) -> SeriesResult:
    """``g*_w = sum_n eps^n (T P)^n g_w`` for the Green function of ``Delta - eps p``."""
    eps = float(eps)
    pv = op.node_values(p)
    if eps == 0.0 or not np.any(pv):
        return _series(op, w, probes, None, 1, tol, 0.0)
    q = abs(eps) * float(np.max(np.abs(pv))) * op.norm
    if q >= 1.0:
        raise ResonanceError(f"|eps| * |p| * ||T|| = {q:.4f} >= 1: series diverges")
    return _series(op, w, probes, lambda t: eps * pv * t, max_terms, tol, q)
