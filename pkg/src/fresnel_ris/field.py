"""Physical-optics received field, antenna patterns and spectrum efficiency.

Each element is a small aperture in its own far field.  Its reflected field
at the receiver is

    Gamma * A * K * a b * exp(-jk (r_i + r_r)) / (2j lam r_r r_i)
          * sinc(k a Ax / 2) * sinc(k b Ay / 2)

with the obliquity ``K = cos(theta_r) + cos(theta_i)``, the direction sums
``Ax``, ``Ay`` of incident and reflected unit vectors and the Friis amplitude
``A = sqrt(eta0 Pt Gt / 2 pi)``.  Power follows from the effective receive
aperture ``Ae = Gr lam^2 / 4 pi`` as ``|E|^2 Ae / (2 eta0)``.

The receiver is isotropic (``Gr = 1``); transmit antennas follow the cos^q
family aimed at the centre of the scenario's boresight panel.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ShadowedElementError
from .geometry import fraunhofer_element
from .units import ETA0, db_to_lin


@dataclass
class ElementAngles:
    """Angles (rad) and distances (m) seen by one or many elements, panel-local frame."""

    theta_i: np.ndarray
    phi_i: np.ndarray
    theta_r: np.ndarray
    phi_r: np.ndarray
    theta_t: np.ndarray
    theta_rx: np.ndarray
    r_i0: np.ndarray
    r_r0: np.ndarray


@dataclass
class PowerResult:
    field: complex
    power_w: float
    se_bps_hz: float
    per_element: list = None

    @property
    def power_dbm(self):
        from .units import w_to_dbm
        return w_to_dbm(self.power_w) if self.power_w > 0 else -math.inf


def cosq_exponent(boresight_gain_dbi):
    return db_to_lin(boresight_gain_dbi) / 2.0 - 1.0


def cosq_gain(theta, boresight_gain_dbi):
    """``2 (q + 1) cos^q(theta)`` with ``q = G0 / 2 - 1``; zero beyond pi/2.

    A boresight gain below 3 dBi implies ``q < 0``; the pattern then falls
    back to isotropic.
    """
    q = cosq_exponent(boresight_gain_dbi)
    theta = np.asarray(theta, dtype=float)
    if q < 0:
        warnings.warn(f"{boresight_gain_dbi} dBi implies q < 0; using an isotropic pattern",
                      stacklevel=2)
        out = np.ones_like(theta)
    else:
        c = np.clip(np.cos(theta), 0.0, None)
        out = np.where(theta <= math.pi / 2, 2.0 * (q + 1.0) * c ** q, 0.0)
    return float(out) if out.ndim == 0 else out


def sinc(x):
    """``sin(x) / x`` with the removable singularity filled in."""
    return np.sinc(np.asarray(x) / math.pi)


def _unit(v):
    n = np.linalg.norm(v, axis=-1)
    return v / n[..., None], n


def _off_axis(direction, axis):
    cosang = np.clip(np.sum(direction * axis, axis=-1), -1.0, 1.0)
    return np.arccos(cosang)


def element_angles(p, tx, rx, panel=None, boresight_target=None, strict=True):
    """Incidence/reflection angles at element centre(s) ``p``.

    ``p``, ``tx`` and ``rx`` are panel-local unless ``panel`` is given, in which
    case ``tx``, ``rx`` and ``boresight_target`` are world points and ``p`` is
    panel-local.  The Tx boresight points at ``boresight_target`` (default:
    the local origin, i.e. the panel centre).
    """
    p = np.asarray(p, dtype=float)
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    if panel is not None:
        target = panel.origin if boresight_target is None else boresight_target
        target_l = panel.to_local(target)
        tx, rx = panel.to_local(tx), panel.to_local(rx)
    else:
        target_l = np.zeros(3) if boresight_target is None else np.asarray(boresight_target)
    if strict and (tx[2] <= 0 or rx[2] <= 0):
        raise ShadowedElementError("tx or rx lies behind the panel")
    ui, ri = _unit(tx - p)
    ur, rr = _unit(rx - p)
    bore, _ = _unit(target_l - tx)
    theta_t = _off_axis(-ui, bore)
    # isotropic receiver: boresight taken along the line to the same target
    rbore, _ = _unit(target_l - rx)
    theta_rx = _off_axis(-ur, rbore)
    return ElementAngles(
        theta_i=np.arccos(np.clip(ui[..., 2], -1.0, 1.0)),
        phi_i=np.arctan2(ui[..., 1], ui[..., 0]),
        theta_r=np.arccos(np.clip(ur[..., 2], -1.0, 1.0)),
        phi_r=np.arctan2(ur[..., 1], ur[..., 0]),
        theta_t=theta_t,
        theta_rx=theta_rx,
        r_i0=ri,
        r_r0=rr,
    )


def friis_amplitude(tx_power_w, gain):
    return np.sqrt(ETA0 * tx_power_w * np.asarray(gain) / (2.0 * math.pi))


def element_field(angles, coeff, lam, a, b, tx_power_w, tx_gain_dbi, check_far_field=True):
    """Reflected field of element(s) with coefficient ``coeff`` at the receiver."""
    coeff = np.asarray(coeff, dtype=complex)
    if check_far_field:
        d_f = fraunhofer_element(a, b, lam)
        if np.min(angles.r_i0) <= 10 * d_f or np.min(angles.r_r0) <= 10 * d_f:
            warnings.warn("Tx or Rx within 10x the element Fraunhofer distance", stacklevel=2)
    k = 2.0 * math.pi / lam
    ti, pi_, tr, pr = angles.theta_i, angles.phi_i, angles.theta_r, angles.phi_r
    lean = np.cos(tr) + np.cos(ti)
    ax = np.sin(ti) * np.cos(pi_) + np.sin(tr) * np.cos(pr)
    ay = np.sin(ti) * np.sin(pi_) + np.sin(tr) * np.sin(pr)
    amp = friis_amplitude(tx_power_w, cosq_gain(angles.theta_t, tx_gain_dbi))
    ri, rr = angles.r_i0, angles.r_r0
    prop = np.exp(-1j * k * (ri + rr)) / (2j * lam * rr * ri)
    out = coeff * amp * lean * a * b * prop * sinc(k * a * ax / 2.0) * sinc(k * b * ay / 2.0)
    return np.where(coeff == 0, 0.0 + 0j, out)


def effective_aperture(lam, rx_gain=1.0):
    return rx_gain * lam * lam / (4.0 * math.pi)


def field_to_power(e, lam, rx_gain=1.0):
    return float(abs(e) ** 2 * effective_aperture(lam, rx_gain) / (2.0 * ETA0))


def spectrum_efficiency(power_w, noise_w):
    if not noise_w > 0:
        raise DomainError(f"noise power must be positive, got {noise_w}")
    return float(np.log2(1.0 + np.asarray(power_w) / noise_w))


def _per_antenna_power(scenario):
    return scenario.tx_power_w / len(scenario.tx_antennas)


def element_channels(scenario, tx_power_w=None):
    """Per-panel ``(rows, cols)`` fields at the receiver for unit coefficients.

    Transmit antennas share the power equally and radiate the same symbol, so
    their contributions add coherently.  Elements with the Tx or Rx behind
    the panel contribute nothing.
    """
    p_ant = _per_antenna_power(scenario) if tx_power_w is None else tx_power_w / len(
        scenario.tx_antennas)
    target = scenario.panels[scenario.boresight_panel].origin
    out = []
    for panel in scenario.panels:
        local = panel.element_centers_local()
        rx_l = panel.to_local(scenario.rx)
        h = np.zeros(panel.shape, dtype=complex)
        for tx in scenario.tx_antennas:
            tx_l = panel.to_local(tx)
            if tx_l[2] <= 0 or rx_l[2] <= 0:
                warnings.warn("panel shadowed for a Tx/Rx pair; its elements contribute zero",
                              stacklevel=2)
                continue
            ang = element_angles(local, tx, scenario.rx, panel, boresight_target=target)
            h += element_field(ang, 1.0, scenario.lam, panel.elem_a, panel.elem_b, p_ant,
                               scenario.tx_boresight_gain_dbi)
        out.append(h)
    return out


def direct_field(scenario, tx_power_w=None):
    """Friis direct-path field at the receiver, summed over Tx antennas."""
    p_ant = _per_antenna_power(scenario) if tx_power_w is None else tx_power_w / len(
        scenario.tx_antennas)
    target = scenario.panels[scenario.boresight_panel].origin
    k = 2.0 * math.pi / scenario.lam
    e = 0j
    for tx in scenario.tx_antennas:
        u, r = _unit(scenario.rx - tx)
        bore, _ = _unit(target - tx)
        g = cosq_gain(_off_axis(u, bore), scenario.tx_boresight_gain_dbi)
        e += complex(friis_amplitude(p_ant, g) / r * np.exp(-1j * k * r))
    return e


def _as_config_list(cfg, scenario):
    if isinstance(cfg, (list, tuple)):
        cfgs = list(cfg)
    else:
        cfgs = [cfg]
    if len(cfgs) != len(scenario.panels):
        raise DomainError(f"{len(cfgs)} configurations for {len(scenario.panels)} panels")
    return cfgs


class Link:
    """Cached channel of one scenario; evaluates many configurations cheaply.

    Everything scales with the square root of transmit power, so channels are
    computed once at the scenario's power and rescaled on request.
    """

    def __init__(self, scenario):
        self.scenario = scenario
        self.channels = element_channels(scenario)
        self.direct = direct_field(scenario)
        self.lam = scenario.lam
        self.noise_w = scenario.noise_w

    def _scale(self, tx_power_w):
        if tx_power_w is None:
            return 1.0
        return math.sqrt(tx_power_w / self.scenario.tx_power_w)

    def field(self, cfg, los=None, tx_power_w=None, per_element=False):
        los = self.scenario.los if los is None else los
        s = self._scale(tx_power_w)
        parts = [c.coeffs * h * s for c, h in zip(_as_config_list(cfg, self.scenario),
                                                  self.channels)]
        # row-major sum in a fixed order keeps results reproducible
        e = complex(sum(complex(np.sum(p.ravel())) for p in parts))
        if los:
            e += self.direct * s
        return e, (parts if per_element else None)

    def evaluate(self, cfg, los=None, tx_power_w=None, per_element=False):
        e, parts = self.field(cfg, los, tx_power_w, per_element)
        p = field_to_power(e, self.lam)
        return PowerResult(e, p, spectrum_efficiency(p, self.noise_w), parts)

    def direct_only(self, tx_power_w=None):
        p = field_to_power(self.direct * self._scale(tx_power_w), self.lam)
        return PowerResult(self.direct * self._scale(tx_power_w), p,
                           spectrum_efficiency(p, self.noise_w))


def received_power_nlos(cfg, scenario, per_element=False):
    return Link(scenario).evaluate(cfg, los=False, per_element=per_element)


def received_power_los(cfg, scenario, per_element=False):
    return Link(scenario).evaluate(cfg, los=True, per_element=per_element)


def received_power(cfg, scenario, per_element=False):
    """Received power with the scenario's own LoS flag."""
    return Link(scenario).evaluate(cfg, per_element=per_element)
