"""NumPy implementation of the hot kernels; the reference for the compiled twin."""

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_iterations(ax, by, n_grid, tol):
    """Golden-section steps needed so the bracket maps to < tol metres of curve."""
    speed = max(float(np.max(np.abs(ax), initial=0.0)), float(np.max(np.abs(by), initial=0.0)))
    width = 2.0 * (2.0 * math.pi / n_grid)
    if speed * width <= tol:
        return 0
    return int(math.ceil(math.log(tol / (speed * width)) / math.log(INV_PHI)))


CHUNK = 4096


def ellipse_min_distance(px, py, cx, ax, by, n_grid=256, tol=1e-6):
    """Minimum distance from each point to the ellipse ``(cx + ax cos t, by sin t)``.

    ``cx``, ``ax`` and ``by`` are scalars or per-point arrays.  A uniform
    grid in ``t`` brackets the nearest sample, then golden-section search
    refines inside the two neighbouring grid cells.
    """
    px = np.ascontiguousarray(px, dtype=float)
    py = np.ascontiguousarray(py, dtype=float)
    if px.size == 0:
        return np.empty(0)
    cx, ax, by = (np.broadcast_to(np.asarray(v, dtype=float), px.shape) for v in (cx, ax, by))
    if px.size > CHUNK:
        iters = golden_iterations(ax, by, n_grid, tol)
        return np.concatenate([
            _min_distance(px[s], py[s], cx[s], ax[s], by[s], n_grid, iters)
            for s in (slice(k, k + CHUNK) for k in range(0, px.size, CHUNK))])
    return _min_distance(px, py, cx, ax, by, n_grid, golden_iterations(ax, by, n_grid, tol))


def _min_distance(px, py, cx, ax, by, n_grid, iters):
    step = 2.0 * math.pi / n_grid
    t = np.arange(n_grid) * step
    vx = cx[:, None] + ax[:, None] * np.cos(t)[None, :]
    vy = by[:, None] * np.sin(t)[None, :]
    d2 = (px[:, None] - vx) ** 2 + (py[:, None] - vy) ** 2
    k = np.argmin(d2, axis=1)
    best = d2[np.arange(px.size), k]

    def f(tt):
        return (px - cx - ax * np.cos(tt)) ** 2 + (py - by * np.sin(tt)) ** 2

    a = (k - 1) * step
    b = (k + 1) * step
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c, d = (np.where(left, b - INV_PHI * (b - a), d),
                np.where(left, c, a + INV_PHI * (b - a)))
        fx = f(np.where(left, c, d))
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
    best = np.minimum(best, np.minimum(fc, fd))
    return np.sqrt(best)
