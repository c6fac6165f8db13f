"""Coordinate frames, Fraunhofer distances and Fresnel-zone/plane geometry.

Zone geometry is evaluated in the auxiliary *B-frame* of one (Tx, Rx) pair:
origin at the receiver's projection onto the panel plane, x-axis along the
ground projection of the Rx->Tx line, z-axis along the panel normal.  In this
frame the receiver sits at ``(0, 0, zr)`` and the transmitter at
``(xt, 0, zt)`` with ``xt > 0``.

The i-th zone boundary is the prolate spheroid with foci Tx and Rx whose
points exceed the direct path by ``i * lam / 2``.  Each cross-section taken
perpendicular to the Tx-Rx axis at distance ``d1`` from Rx is a circle of
radius ``rho``; its intersection with the panel plane gives the two points
``V = (Qx(d1), +/- sqrt(rho^2 - PQ^2), 0)``.  Two radius models exist:

``"exact"``
    the spheroid cross-section, exact for every zone index.
``"fresnel"``
    the textbook ``rho^2 = i lam d1 d2 / d``, a first-order expansion that is
    only accurate while ``i * lam << d``.

Both make ``rho^2 - PQ^2`` quadratic in ``d1`` while ``Qx`` is affine in
``d1``, so every zone curve is an axis-aligned ellipse in the B-frame.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DegenerateFrameError, DomainError

RADIUS_MODELS = ("exact", "fresnel")


def as_point(p, name="point"):
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise DomainError(f"{name} must have 3 components, got shape {np.shape(p)}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite components: {arr}")
    return arr


@dataclass(frozen=True, eq=False)
class PanelSpec:
    """One rectangular panel of ``rows x cols`` elements of size ``elem_a x elem_b``.

    ``orientation`` holds the panel-local axes as columns, expressed in world
    coordinates; its third column is the surface normal.  Rows run along the
    local x-axis, columns along the local y-axis.
    """

    rows: int
    cols: int
    elem_a: float
    elem_b: float
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if int(self.rows) != self.rows or self.rows < 1 or int(self.cols) != self.cols or self.cols < 1:
            raise DomainError(f"panel needs rows, cols >= 1, got {self.rows}x{self.cols}")
        if not (self.elem_a > 0 and self.elem_b > 0):
            raise DomainError(f"element size must be positive, got {self.elem_a} x {self.elem_b}")
        origin = as_point(self.origin, "panel origin")
        rot = np.asarray(self.orientation, dtype=float)
        if rot.shape != (3, 3) or not np.all(np.isfinite(rot)):
            raise DomainError("panel orientation must be a finite 3x3 matrix")
        if np.max(np.abs(rot.T @ rot - np.eye(3))) > 1e-12:
            raise DomainError("panel orientation must be orthonormal within 1e-12")
        object.__setattr__(self, "rows", int(self.rows))
        object.__setattr__(self, "cols", int(self.cols))
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "orientation", rot)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def size(self):
        return self.rows * self.cols

    @property
    def width_x(self):
        return self.rows * self.elem_a

    @property
    def width_y(self):
        return self.cols * self.elem_b

    @property
    def normal(self):
        return self.orientation[:, 2].copy()

    def element_xy(self):
        """Local (x, y) of every element center as two ``(rows, cols)`` arrays."""
        m = np.arange(1, self.rows + 1)
        n = np.arange(1, self.cols + 1)
        x = (2 * m - self.rows - 1) / 2.0 * self.elem_a
        y = (2 * n - self.cols - 1) / 2.0 * self.elem_b
        return np.meshgrid(x, y, indexing="ij")

    def element_centers_local(self):
        x, y = self.element_xy()
        return np.stack([x, y, np.zeros_like(x)], axis=-1)

    def element_centers_world(self):
        return self.to_world(self.element_centers_local())

    def corner_indices(self):
        """(row, col) indices of the four outermost corner elements."""
        last_r, last_c = self.rows - 1, self.cols - 1
        return [(0, 0), (0, last_c), (last_r, 0), (last_r, last_c)]

    def to_local(self, p):
        return (np.asarray(p, dtype=float) - self.origin) @ self.orientation

    def to_world(self, p_local):
        return np.asarray(p_local, dtype=float) @ self.orientation.T + self.origin

    def contains_local(self, x, y):
        """True where local (x, y) falls on the panel aperture."""
        return (np.abs(x) <= 0.5 * self.width_x) & (np.abs(y) <= 0.5 * self.width_y)


def fraunhofer_element(a, b, lam):
    if not (a > 0 and b > 0 and lam > 0):
        raise DomainError(f"a, b and lambda must be positive, got a={a}, b={b}, lambda={lam}")
    return 2.0 * math.pi * (a * a + b * b) / lam


def fraunhofer_array(panel, lam):
    return fraunhofer_element(panel.width_x, panel.width_y, lam)


def rotation_z(chi):
    c, s = math.cos(chi), math.sin(chi)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True, eq=False)
class FrameB:
    """B-frame of one (Tx, Rx) pair, built from panel-local coordinates."""

    chi: float
    tx_b: np.ndarray
    rx_b: np.ndarray
    d: float
    shift: np.ndarray     # (xr, yr, 0) in panel-local coordinates

    @property
    def xt(self):
        return float(self.tx_b[0])

    @property
    def zt(self):
        return float(self.tx_b[2])

    @property
    def zr(self):
        return float(self.rx_b[2])

    def to_b(self, p_local):
        return (np.asarray(p_local, dtype=float) - self.shift) @ rotation_z(self.chi).T

    def from_b(self, p_b):
        return np.asarray(p_b, dtype=float) @ rotation_z(self.chi) + self.shift


def build_b_frame(tx, rx):
    """Build the B-frame from Tx and Rx given in panel-local coordinates.

    The translation is applied before the rotation so that the receiver's
    ground projection lands on the origin for every ``chi``.
    """
    tx = as_point(tx, "tx")
    rx = as_point(rx, "rx")
    dx, dy = tx[0] - rx[0], tx[1] - rx[1]
    d = float(np.linalg.norm(tx - rx))
    if d == 0.0:
        raise DegenerateFrameError("tx and rx coincide")
    if math.hypot(dx, dy) <= 1e-12 * d:
        raise DegenerateFrameError("tx and rx share a ground projection; zone frame undefined")
    chi = math.atan2(dy, dx)
    shift = np.array([rx[0], rx[1], 0.0])
    rot_t = rotation_z(chi).T
    tx_b = (tx - shift) @ rot_t
    rx_b = (rx - shift) @ rot_t
    tx_b[1] = 0.0
    rx_b[0] = rx_b[1] = 0.0
    return FrameB(chi=chi, tx_b=tx_b, rx_b=rx_b, d=d, shift=shift)


def fresnel_radius(i, d1, d2, lam):
    """First-order Fresnel radius ``sqrt(i lam d1 d2 / (d1 + d2))``."""
    if i < 1 or lam <= 0 or d1 < 0 or d2 <= 0 or (d1 + d2) <= 0:
        raise DomainError(f"invalid Fresnel radius inputs i={i}, d1={d1}, d2={d2}, lambda={lam}")
    if 0 < min(d1, d2) < 100 * lam:
        warnings.warn("d1 or d2 below 100 wavelengths; Fresnel radius expansion is inaccurate",
                      RuntimeWarning, stacklevel=2)
    return math.sqrt(i * lam * d1 * d2 / (d1 + d2))


def _rho_sq_coeffs(i, d, lam, model):
    """Coefficients (c2, c1, c0) of rho^2 as a polynomial in d1."""
    if model == "exact":
        major = 0.5 * (d + 0.5 * i * lam)
        minor_sq = 0.25 * (i * lam * d + 0.25 * (i * lam) ** 2)
        kappa = minor_sq / (major * major)
        return -kappa, kappa * d, minor_sq - kappa * d * d / 4.0
    if model == "fresnel":
        return -i * lam / d, i * lam, 0.0
    raise DomainError(f"unknown radius model {model!r}; expected one of {RADIUS_MODELS}")


def d1_domain(frame, i, lam, model="exact"):
    """Range of d1 on which the radius model is defined."""
    if model == "exact":
        half = 0.5 * (frame.d + 0.5 * i * lam)
        return 0.5 * frame.d - half, 0.5 * frame.d + half
    return 0.0, frame.d


class ZoneEllipse(NamedTuple):
    """Plane section of one zone: ``V(t) = (cx + ax cos t, by sin t)`` in B-frame."""

    i: float
    cx: float
    ax: float
    by: float
    d1_lo: float
    d1_hi: float

    def point(self, t):
        return self.cx + self.ax * np.cos(t), self.by * np.sin(t)

    def d1(self, t):
        return 0.5 * (self.d1_lo + self.d1_hi) + 0.5 * (self.d1_hi - self.d1_lo) * np.cos(t)


class ZoneCurvePoint(NamedTuple):
    d1: float
    v: np.ndarray
    branch: int     # +1 or -1


def radicand_coeffs(frame, i, lam, model="exact"):
    """Coefficients (a2, a1, a0) of ``rho^2(d1) - PQ(d1)^2``."""
    xt, zr, d = frame.xt, frame.zr, frame.d
    dz = frame.zt - zr
    c2, c1, c0 = _rho_sq_coeffs(i, d, lam, model)
    return (c2 - dz * dz / (xt * xt),
            c1 - 2.0 * zr * d * dz / (xt * xt),
            c0 - (zr * d) ** 2 / (xt * xt))


def radicand(frame, i, d1, lam, model="exact"):
    a2, a1, a0 = radicand_coeffs(frame, i, lam, model)
    return (a2 * d1 + a1) * d1 + a0


def foot_x(frame, d1):
    """x-coordinate of Q (equals |R_perp Q|) by the foot-of-perpendicular construction."""
    return frame.zr * (frame.zt - frame.zr) / frame.xt + d1 * frame.d / frame.xt


def perp_foot_lengths(frame, d1):
    """Return ``(|PQ|, |R_perp Q|)`` for the point P at distance ``d1`` from Rx.

    ``|R_perp Q|`` uses the signed height difference; with equal heights the
    closed form is 0/0 and the foot-of-perpendicular limit ``d1 d / xt`` is
    returned instead.
    """
    d = frame.d
    if not (0.0 < d1 < d):
        raise DomainError(f"d1 must lie in (0, d={d}), got {d1}")
    xt, zt, zr = frame.xt, frame.zt, frame.zr
    d2 = d - d1
    s = zr * d2 + zt * d1
    pq = s / abs(xt)
    dz = zt - zr
    if abs(dz) <= 1e-12 * d:
        return pq, foot_x(frame, d1)
    return pq, (s * d - zr * xt * xt) / (dz * abs(xt))


def zone_plane_intersection(frame, i, d1, lam, model="exact"):
    """The 0 or 2 points where the i-th zone's cross-section at ``d1`` meets the plane."""
    if i < 1:
        raise DomainError(f"zone index must be >= 1, got {i}")
    lo, hi = d1_domain(frame, i, lam, model)
    if not (lo < d1 < hi):
        raise DomainError(f"d1={d1} outside ({lo}, {hi})")
    rad = radicand(frame, i, d1, lam, model)
    if rad < 0:
        return []
    vx = foot_x(frame, d1)
    vy = math.sqrt(rad)
    return [ZoneCurvePoint(d1, np.array([vx, sign * vy, 0.0]), sign) for sign in (1, -1)]


def zone_ellipse(frame, i, lam, model="exact"):
    """The whole plane section of zone ``i`` as a :class:`ZoneEllipse`, or None if empty."""
    a2, a1, a0 = radicand_coeffs(frame, i, lam, model)
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc <= 0.0:
        return None
    sq = math.sqrt(disc)
    r1, r2 = sorted(((-a1 + sq) / (2.0 * a2), (-a1 - sq) / (2.0 * a2)))
    lo, hi = d1_domain(frame, i, lam, model)
    # roots always sit inside the model's domain: rho vanishes at its ends
    r1, r2 = max(r1, lo), min(r2, hi)
    if r2 <= r1:
        return None
    m, h = 0.5 * (r1 + r2), 0.5 * (r2 - r1)
    q1 = frame.d / frame.xt
    return ZoneEllipse(i=i, cx=foot_x(frame, m), ax=q1 * h, by=math.sqrt(-a2) * h,
                       d1_lo=r1, d1_hi=r2)


def zone_ellipse_arrays(frame, zones, lam, model="exact"):
    """Vectorized :func:`zone_ellipse` over an array of zone indices.

    Returns ``(cx, ax, by, d1_lo, d1_hi, valid)``; entries with ``valid`` False
    are empty curves and hold NaN.
    """
    i = np.asarray(zones, dtype=float)
    a2, a1, a0 = radicand_coeffs(frame, i, lam, model)
    a2, a1, a0 = np.broadcast_arrays(a2, a1, a0)
    disc = a1 * a1 - 4.0 * a2 * a0
    sq = np.sqrt(np.where(disc > 0, disc, np.nan))
    ra, rb = (-a1 + sq) / (2.0 * a2), (-a1 - sq) / (2.0 * a2)
    lo, hi = d1_domain(frame, i, lam, model)
    r1 = np.maximum(np.minimum(ra, rb), lo)
    r2 = np.minimum(np.maximum(ra, rb), hi)
    valid = (disc > 0) & (r2 > r1)
    m, h = 0.5 * (r1 + r2), 0.5 * (r2 - r1)
    cx = foot_x(frame, m)
    ax = frame.d / frame.xt * h
    by = np.sqrt(np.where(valid, -a2, np.nan)) * h
    nan = np.where(valid, 1.0, np.nan)
    return cx * nan, ax * nan, by * nan, r1 * nan, r2 * nan, valid


def excess_path(p, tx, rx, lam):
    """Path excess of the detour through ``p`` and its fractional zone index ``2 delta / lam``."""
    p, tx, rx = (np.asarray(v, dtype=float) for v in (p, tx, rx))
    delta = (np.linalg.norm(tx - p, axis=-1) + np.linalg.norm(p - rx, axis=-1)
             - np.linalg.norm(tx - rx))
    delta = np.maximum(delta, 0.0)
    if delta.ndim == 0:
        delta = float(delta)
    return delta, 2.0 * delta / lam


def min_distance_to_zone_curve(p, frame, i, lam, model="exact", n_grid=256, tol=1e-6):
    """Distance from a B-frame plane point to the i-th zone curve (``inf`` if the curve is empty)."""
    from .kernels import ellipse_min_distance

    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 3 and p.shape[-1] != 2:
        raise DomainError("p must have 2 or 3 components")
    if p.shape[-1] == 3 and np.any(np.abs(p[..., 2]) > 1e-9):
        raise DomainError("p must lie on the panel plane (z = 0)")
    ell = zone_ellipse(frame, i, lam, model)
    px = np.atleast_1d(p[..., 0]).astype(float)
    py = np.atleast_1d(p[..., 1]).astype(float)
    if ell is None:
        out = np.full(px.shape, np.inf)
    else:
        out = ellipse_min_distance(px.ravel(), py.ravel(), ell.cx, ell.ax, ell.by,
                                   n_grid, tol).reshape(px.shape)
    return float(out[0]) if p.ndim == 1 else out
