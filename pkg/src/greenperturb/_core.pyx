# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same signatures as ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, atan, atan2, sqrt, cos, sin, M_PI, INFINITY

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


cdef inline double _anti(double x, double y) nogil:
    cdef double r2 = x * x + y * y
    cdef double out = 0.0
    if r2 > 0:
        out += x * y * (log(r2) - 3.0)
    if x != 0:
        out += x * x * atan(y / x)
    if y != 0:
        out += y * y * atan(x / y)
    return out


cdef inline double _rect_log_mean(double dx, double dy, double a, double b) nogil:
    cdef double x1 = dx - 0.5 * a, x2 = dx + 0.5 * a
    cdef double y1 = dy - 0.5 * b, y2 = dy + 0.5 * b
    return 0.5 * (_anti(x2, y2) - _anti(x1, y2) - _anti(x2, y1) + _anti(x1, y1)) / (a * b)


def rect_log_mean(dx, dy, a, b):
    cdef cnp.ndarray[double, ndim=1] X, Y, A, B, out
    arrs = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (dx, dy, a, b)))
    shape = arrs[0].shape
    X, Y, A, B = (np.ascontiguousarray(v).ravel() for v in arrs)
    out = np.empty(X.shape[0])
    cdef Py_ssize_t i, n = X.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _rect_log_mean(X[i], Y[i], A[i], B[i])
    return out.reshape(shape)


def disk_kernel(targets, sources, double R):
    cdef cnp.ndarray[complex, ndim=1] t = np.ascontiguousarray(targets, dtype=complex).ravel()
    cdef cnp.ndarray[complex, ndim=1] s = np.ascontiguousarray(sources, dtype=complex).ravel()
    cdef Py_ssize_t nt = t.shape[0], ns = s.shape[0], i, j
    cdef cnp.ndarray[double, ndim=2] out = np.empty((nt, ns))
    cdef double tx, ty, sx, sy, dx, dy, ux, uy, R2 = R * R, d2
    with nogil:
        for i in range(nt):
            tx = t[i].real
            ty = t[i].imag
            for j in range(ns):
                sx = s[j].real
                sy = s[j].imag
                dx = tx - sx
                dy = ty - sy
                d2 = dx * dx + dy * dy
                # R^2 - t * conj(s)
                ux = R2 - (tx * sx + ty * sy)
                uy = -(ty * sx - tx * sy)
                if d2 == 0:
                    out[i, j] = -INFINITY
                else:
                    out[i, j] = (0.5 * log(d2) - 0.5 * log(ux * ux + uy * uy) + log(R)) / TWO_PI
    return out


def sw_assemble(index, frac, double h):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] idx = np.ascontiguousarray(index, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=3] fr = np.ascontiguousarray(frac, dtype=float)
    cdef Py_ssize_t ny = idx.shape[0], nx = idx.shape[1], i, j, k, ni, nj
    cdef Py_ssize_t n = int(idx.max()) + 1
    cdef cnp.ndarray[double, ndim=1] diag = np.empty(n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] rows = np.empty(4 * n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cols = np.empty(4 * n, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] vals = np.empty(4 * n)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] brow = np.empty(4 * n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bdir = np.empty(4 * n, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] bcoef = np.empty(4 * n)
    cdef Py_ssize_t nf = 0, nb = 0, p, q
    cdef double t[4]
    cdef double c[4]
    cdef int di[4]
    cdef int dj[4]
    di[:] = [0, 0, 1, -1]
    dj[:] = [1, -1, 0, 0]
    cdef double h2 = h * h
    # ordering of the off-diagonal/boundary entries matches the fallback:
    # grouped by direction, then by row-major node order
    for k in range(4):
        for i in range(ny):
            for j in range(nx):
                p = idx[i, j]
                if p < 0:
                    continue
                t[0] = fr[0, i, j]; t[1] = fr[1, i, j]; t[2] = fr[2, i, j]; t[3] = fr[3, i, j]
                c[0] = 2.0 / (h2 * t[0] * (t[0] + t[1]))
                c[1] = 2.0 / (h2 * t[1] * (t[0] + t[1]))
                c[2] = 2.0 / (h2 * t[2] * (t[2] + t[3]))
                c[3] = 2.0 / (h2 * t[3] * (t[2] + t[3]))
                if k == 0:
                    diag[p] = -(c[0] + c[1] + c[2] + c[3])
                ni = i + di[k]
                nj = j + dj[k]
                q = -1
                if 0 <= ni < ny and 0 <= nj < nx:
                    q = idx[ni, nj]
                if q >= 0 and t[k] == 1.0:
                    rows[nf] = p; cols[nf] = q; vals[nf] = c[k]
                    nf += 1
                else:
                    brow[nb] = p; bdir[nb] = k; bcoef[nb] = c[k]
                    nb += 1
    return (rows[:nf].copy(), cols[:nf].copy(), vals[:nf].copy(), diag,
            brow[:nb].copy(), bdir[:nb].copy(), bcoef[:nb].copy())


cdef inline double _star_f(double x, double y, double[::1] a, double[::1] b) nogil:
    cdef double ang = atan2(y, x), rho = 0.0
    cdef Py_ssize_t k
    for k in range(a.shape[0]):
        rho += a[k] * cos(k * ang) + b[k] * sin(k * ang)
    return sqrt(x * x + y * y) - rho


def star_crossings(px, py, ux, uy, double h, a, b):
    cdef double[::1] PX = np.ascontiguousarray(px, dtype=float)
    cdef double[::1] PY = np.ascontiguousarray(py, dtype=float)
    cdef double[::1] UX = np.ascontiguousarray(ux, dtype=float)
    cdef double[::1] UY = np.ascontiguousarray(uy, dtype=float)
    cdef double[::1] A = np.ascontiguousarray(a, dtype=float)
    cdef double[::1] B = np.ascontiguousarray(b, dtype=float)
    cdef Py_ssize_t n = PX.shape[0], i, it
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double lo, hi, mid
    with nogil:
        for i in range(n):
            lo = 0.0
            hi = 1.0
            for it in range(64):
                mid = 0.5 * (lo + hi)
                if _star_f(PX[i] + mid * h * UX[i], PY[i] + mid * h * UY[i], A, B) >= 0:
                    hi = mid
                else:
                    lo = mid
            o[i] = hi
    return out
