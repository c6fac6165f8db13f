# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_pykernels``; same grid and golden-section steps."""

import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI

from ._pykernels import golden_iterations

cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline double _d2(double px, double py, double cx, double ax, double by, double t) nogil:
    cdef double dx = px - cx - ax * cos(t)
    cdef double dy = py - by * sin(t)
    return dx * dx + dy * dy


def ellipse_min_distance(px, py, cx, ax, by, int n_grid=256, double tol=1e-6):
    """Minimum distance from each point to the ellipse ``(cx + ax cos t, by sin t)``."""
    cdef const double[::1] x = np.ascontiguousarray(px, dtype=np.float64).reshape(-1)
    cdef const double[::1] y = np.ascontiguousarray(py, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = x.shape[0]
    if n == 0:
        return np.empty(0)
    cx_a = np.ascontiguousarray(np.broadcast_to(np.asarray(cx, dtype=np.float64), (n,)))
    ax_a = np.ascontiguousarray(np.broadcast_to(np.asarray(ax, dtype=np.float64), (n,)))
    by_a = np.ascontiguousarray(np.broadcast_to(np.asarray(by, dtype=np.float64), (n,)))
    cdef const double[::1] ecx = cx_a
    cdef const double[::1] eax = ax_a
    cdef const double[::1] eby = by_a
    cdef int iters = golden_iterations(ax_a, by_a, n_grid, tol)
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef double[::1] ct = np.cos(np.arange(n_grid) * (2.0 * M_PI / n_grid))
    cdef double[::1] st = np.sin(np.arange(n_grid) * (2.0 * M_PI / n_grid))
    cdef double step = 2.0 * M_PI / n_grid
    cdef Py_ssize_t p, j
    cdef int it, k
    cdef double best, v, dx, dy, a, b, c, d, fc, fd, fx
    cdef double qx, qy, pcx, pax, pby
    with nogil:
        for p in range(n):
            qx = x[p]
            qy = y[p]
            pcx = ecx[p]
            pax = eax[p]
            pby = eby[p]
            best = 1e300
            k = 0
            for j in range(n_grid):
                dx = qx - pcx - pax * ct[j]
                dy = qy - pby * st[j]
                v = dx * dx + dy * dy
                if v < best:
                    best = v
                    k = <int>j
            a = (k - 1) * step
            b = (k + 1) * step
            c = b - INV_PHI * (b - a)
            d = a + INV_PHI * (b - a)
            fc = _d2(qx, qy, pcx, pax, pby, c)
            fd = _d2(qx, qy, pcx, pax, pby, d)
            for it in range(iters):
                if fc < fd:
                    b = d
                    d = c
                    fd = fc
                    c = b - INV_PHI * (b - a)
                    fc = _d2(qx, qy, pcx, pax, pby, c)
                else:
                    a = c
                    c = d
                    fc = fd
                    d = a + INV_PHI * (b - a)
                    fd = _d2(qx, qy, pcx, pax, pby, d)
            if fc < best:
                best = fc
            if fd < best:
                best = fd
            out[p] = sqrt(best)
    return out_arr
