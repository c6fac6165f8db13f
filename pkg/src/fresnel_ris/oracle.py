"""Brute-force references used to validate the closed forms.

Nothing here calls the zone-curve or power code it checks.  Zone curves are
found by root-finding the path excess along rays in the panel plane, zone
indices come straight from three distances, and the coherent-sum bound
recomputes every element's field from first principles.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .config import ConfigMatrix
from .units import ETA0


def _excess(p, tx, rx):
    return (np.linalg.norm(tx - p, axis=-1) + np.linalg.norm(p - rx, axis=-1)
            - np.linalg.norm(tx - rx))


def plane_minimizer(tx, rx):
    """Point of the panel plane (z = 0) with the smallest path excess.

    For Tx and Rx on the same side it is the specular reflection point, where
    the excess is zero only if a focus lies on the plane.
    """
    tx, rx = np.asarray(tx, dtype=float), np.asarray(rx, dtype=float)
    w = rx[2] / (rx[2] + tx[2])
    p = rx + w * (tx - rx)
    p[2] = 0.0
    return p


def exact_zone_curve(i, tx, rx, lam, angles=None, n=720, tol=1e-9):
    """Plane points (panel-local, z = 0) where the path excess equals ``i lam / 2``.

    One point per in-plane direction from :func:`plane_minimizer`; the excess
    is convex, so it rises monotonically along every such ray and bisection
    finds the unique crossing.  Returns an empty ``(0, 3)`` array when the
    zone does not reach the plane.
    """
    tx, rx = np.asarray(tx, dtype=float), np.asarray(rx, dtype=float)
    target = 0.5 * i * lam
    p0 = plane_minimizer(tx, rx)
    if _excess(p0, tx, rx) >= target:
        return np.empty((0, 3))
    if angles is None:
        angles = np.arange(n) * (2.0 * math.pi / n)
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    u = np.stack([np.cos(angles), np.sin(angles), np.zeros_like(angles)], axis=-1)

    def f(r):
        return _excess(p0 + r[:, None] * u, tx, rx) - target

    lo = np.zeros(angles.size)
    hi = np.full(angles.size, max(target, 1e-3))
    while np.any(f(hi) < 0):
        hi = np.where(f(hi) < 0, 2.0 * hi, hi)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        below = f(mid) < 0
        lo, hi = np.where(below, mid, lo), np.where(below, hi, mid)
    return p0 + (0.5 * (lo + hi))[:, None] * u


def curve_point_toward(i, tx, rx, lam, point, tol=1e-9):
    """Exact curve point on the ray from the plane minimizer through ``point``."""
    p0 = plane_minimizer(tx, rx)
    v = np.asarray(point, dtype=float) - p0
    ang = math.atan2(v[1], v[0])
    out = exact_zone_curve(i, tx, rx, lam, angles=[ang], tol=tol)
    return out[0] if len(out) else None


@dataclass
class ZoneIndexField:
    values: np.ndarray

    @property
    def shape(self):
        return self.values.shape


def _element_centers(panel):
    rows, cols = panel.rows, panel.cols
    x = (np.arange(rows) - (rows - 1) / 2.0) * panel.elem_a
    y = (np.arange(cols) - (cols - 1) / 2.0) * panel.elem_b
    xx, yy = np.meshgrid(x, y, indexing="ij")
    return np.stack([xx, yy, np.zeros_like(xx)], axis=-1)


def zone_index_field(panel, tx, rx, lam):
    """Fractional zone index ``2 delta / lam`` at every element centre.

    ``tx`` and ``rx`` are world points; they are mapped into the panel frame.
    """
    tx_l = (np.asarray(tx, dtype=float) - panel.origin) @ panel.orientation
    rx_l = (np.asarray(rx, dtype=float) - panel.origin) @ panel.orientation
    return ZoneIndexField(2.0 * _excess(_element_centers(panel), tx_l, rx_l) / lam)


def config_via_index(panel_field, tau, gamma_r=0.9):
    """Parity configuration: reflect within ``tau`` of the nearest integer index.

    The nearest boundary's index decides the sign: odd gives ``+gamma_r``, even
    gives ``-gamma_r``.
    """
    f = np.asarray(panel_field.values)
    k = np.rint(f)
    reflect = np.abs(f - k) <= tau
    states = np.where(reflect, np.where(k % 2 == 1, 1, -1), 0)
    return ConfigMatrix.from_states(states, gamma_r, "tposj", source="parity-oracle")


def _cosq(theta, gain_dbi):
    g0 = 10.0 ** (gain_dbi / 10.0)
    q = g0 / 2.0 - 1.0
    if q < 0:
        return np.ones_like(theta)
    return np.where(theta <= math.pi / 2, 2.0 * (q + 1.0) * np.clip(np.cos(theta), 0, None) ** q,
                    0.0)


def element_phasors(scenario):
    """Per-panel complex element fields at unit coefficient, from scratch."""
    lam = scenario.lam
    k = 2.0 * math.pi / lam
    p_ant = 10.0 ** ((scenario.tx_power_dbm - 30.0) / 10.0) / len(scenario.tx_antennas)
    target = scenario.panels[scenario.boresight_panel].origin
    out = []
    for panel in scenario.panels:
        R, o = panel.orientation, panel.origin
        c = _element_centers(panel)
        rx = (scenario.rx - o) @ R
        total = np.zeros(c.shape[:2], dtype=complex)
        for tx_w in scenario.tx_antennas:
            tx = (tx_w - o) @ R
            if tx[2] <= 0 or rx[2] <= 0:
                continue
            vi, vr = tx - c, rx - c
            ri, rr = np.linalg.norm(vi, axis=-1), np.linalg.norm(vr, axis=-1)
            ui, ur = vi / ri[..., None], vr / rr[..., None]
            bore = (target - tx_w) / np.linalg.norm(target - tx_w)
            out_dir = (c @ R.T + o) - tx_w
            out_dir /= np.linalg.norm(out_dir, axis=-1)[..., None]
            theta_t = np.arccos(np.clip(out_dir @ bore, -1, 1))
            amp = np.sqrt(ETA0 * p_ant * _cosq(theta_t, scenario.tx_boresight_gain_dbi)
                          / (2.0 * math.pi))
            lean = ui[..., 2] + ur[..., 2]
            sx = np.sinc(k * panel.elem_a * (ui[..., 0] + ur[..., 0]) / (2.0 * math.pi))
            sy = np.sinc(k * panel.elem_b * (ui[..., 1] + ur[..., 1]) / (2.0 * math.pi))
            total += (amp * lean * panel.elem_a * panel.elem_b * sx * sy
                      * np.exp(-1j * k * (ri + rr)) / (2j * lam * ri * rr))
        out.append(total)
    return out


def coherent_sum_bound(scenario):
    """Largest NLoS power reachable with ``|coefficient| <= gamma_r``: all phasors aligned."""
    mag = math.fsum(float(np.sum(np.abs(h))) for h in element_phasors(scenario))
    e = scenario.gamma_r * mag
    ae = scenario.lam ** 2 / (4.0 * math.pi)
    return e * e * ae / (2.0 * ETA0)


def dump_curve_csv(points, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x_m", "y_m", "z_m"])
        for p in np.asarray(points):
            w.writerow([repr(float(v)) for v in p])
