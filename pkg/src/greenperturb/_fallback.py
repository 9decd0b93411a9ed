"""Pure numpy implementations of the hot kernels.

Signatures mirror the compiled ``_core`` module exactly; see
:mod:`greenperturb.kernels` for the selection logic.
"""
import numpy as np

TWO_PI = 2.0 * np.pi


def _log_rect_antideriv(x, y):
    # F with d2F/dxdy = log(x^2 + y^2); limits at x = 0 or y = 0 are 0
    r2 = x * x + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(r2 > 0, x * y * (np.log(np.where(r2 > 0, r2, 1.0)) - 3.0), 0.0)
        t2 = np.where(x != 0, x * x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
        t3 = np.where(y != 0, y * y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
    return t1 + t2 + t3


def rect_log_mean(dx, dy, a, b):
    """Mean of ``log|xi|`` over the rectangle centred at ``(dx, dy)`` with sides ``a, b``."""
    dx, dy, a, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (dx, dy, a, b)))
    x1, x2 = dx - a / 2, dx + a / 2
    y1, y2 = dy - b / 2, dy + b / 2
    F = _log_rect_antideriv
    total = F(x2, y2) - F(x1, y2) - F(x2, y1) + F(x1, y1)
    return 0.5 * total / (a * b)


def disk_kernel(targets, sources, R):
    """Dense matrix ``g(t_i, s_j)`` of the radius-``R`` disk Green function."""
    t = np.asarray(targets, dtype=complex)[:, None]
    s = np.asarray(sources, dtype=complex)[None, :]
    with np.errstate(divide="ignore"):
        return (np.log(np.abs(t - s)) - np.log(np.abs(R * R - t * np.conj(s)) / R)) / TWO_PI


def sw_assemble(index, frac, h):
    """Shortley-Weller 5-point stencil on a masked grid.

    ``index`` is ``(ny, nx)`` with ``-1`` outside; ``frac`` is ``(4, ny, nx)``
    leg fractions in ``(0, 1]`` for directions E, W, N, S.  Returns
    ``rows, cols, vals`` of the off-diagonal couplings, the diagonal, and
    ``brow, bdir, bcoef`` for legs that end on the boundary.
    """
    ny, nx = index.shape
    ii, jj = np.nonzero(index >= 0)
    p = index[ii, jj]
    tE, tW, tN, tS = (frac[k, ii, jj] for k in range(4))
    cE = 2.0 / (h * h * tE * (tE + tW))
    cW = 2.0 / (h * h * tW * (tE + tW))
    cN = 2.0 / (h * h * tN * (tN + tS))
    cS = 2.0 / (h * h * tS * (tN + tS))
    diag = np.empty(index.max() + 1)
    diag[p] = -(cE + cW + cN + cS)
    rows, cols, vals = [], [], []
    brow, bdir, bcoef = [], [], []
    for k, (di, dj, c) in enumerate(((0, 1, cE), (0, -1, cW), (1, 0, cN), (-1, 0, cS))):
        ni, nj = ii + di, jj + dj
        inb = (ni >= 0) & (ni < ny) & (nj >= 0) & (nj < nx)
        q = np.full(len(p), -1, dtype=np.int64)
        q[inb] = index[ni[inb], nj[inb]]
        full = (q >= 0) & (frac[k, ii, jj] == 1.0)
        rows.append(p[full])
        cols.append(q[full])
        vals.append(c[full])
        brow.append(p[~full])
        bdir.append(np.full((~full).sum(), k, dtype=np.int64))
        bcoef.append(c[~full])
    cat = np.concatenate
    return (cat(rows).astype(np.int64), cat(cols).astype(np.int64), cat(vals), diag,
            cat(brow).astype(np.int64), cat(bdir), cat(bcoef))


def star_crossings(px, py, ux, uy, h, a, b):
    """Fraction ``t in (0, 1]`` where ``P + t h u`` meets ``|z| = rho(arg z)``.

    Bisection to machine precision; ``P`` inside, ``P + h u`` outside.
    """
    px, py, ux, uy = (np.asarray(v, dtype=float) for v in (px, py, ux, uy))
    k = np.arange(len(a))

    def f(t):
        x, y = px + t * h * ux, py + t * h * uy
        ang = np.arctan2(y, x)
        kt = np.multiply.outer(ang, k)
        rho = np.cos(kt) @ a + np.sin(kt) @ b
        return np.hypot(x, y) - rho

    lo = np.zeros_like(px)
    hi = np.ones_like(px)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        out = f(mid) >= 0
        hi = np.where(out, mid, hi)
        lo = np.where(out, lo, mid)
    return hi
