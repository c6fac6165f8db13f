"""Element coefficients, the position-aided zone judgement pipeline and baselines.

The judgement pipeline assigns each element one of three states from its
distance to the Fresnel-zone boundary curves on the panel:

* within ``xi`` of an odd boundary  -> ``+gamma_r`` (OFF state, phase 0)
* within ``xi`` of an even boundary -> ``-gamma_r`` (ON state, phase pi)
* otherwise                         -> absorb (impedance matched, 0)

Per-zone matrices are summed and clipped back to ``{-1, 0, +1}`` by the
step composition :func:`upsilon`.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .exceptions import DomainError, InfeasibleThresholdError
from .geometry import (build_b_frame, excess_path, foot_x, min_distance_to_zone_curve,
                       radicand, zone_ellipse_arrays)
from .units import ETA0

# Judged elements sit within millimetres of curves whose axes span metres, so
# the distance along the curve has a single sharp minimum and a coarse grid
# brackets it safely.
GRID_CURVE = 64
GRID_XI = 512
CURVE_TOL = 1e-6


class ElementState(enum.Enum):
    OFF = 1         # reflect, phase 0
    ON = -1         # reflect, phase pi
    ABSORB = 0


@dataclass(frozen=True)
class ElementCoefficient:
    state: ElementState
    gamma_r: float

    @property
    def value(self):
        return complex(self.state.value * self.gamma_r)


def reflection_coefficient(z_in, eta0=ETA0):
    """Reflection coefficient ``(Z_in - eta0) / (Z_in + eta0)`` of an element."""
    if z_in == complex("inf") or (isinstance(z_in, float) and math.isinf(z_in)):
        return 1.0 + 0j
    den = z_in + eta0
    if den == 0:
        raise DomainError("Z_in = -eta0 makes the reflection coefficient singular")
    return complex((z_in - eta0) / den)


@dataclass
class ConfigMatrix:
    """Per-element complex coefficients of one panel plus their provenance."""

    coeffs: np.ndarray
    provenance: str
    gamma_r: float
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_states(cls, states, gamma_r, provenance, **meta):
        states = np.asarray(states, dtype=np.int8)
        return cls(states.astype(complex) * gamma_r, provenance, gamma_r, dict(meta))

    @property
    def shape(self):
        return self.coeffs.shape

    def states(self):
        """Integer states in {-1, 0, +1}; only meaningful for discrete provenances."""
        if self.gamma_r == 0:
            return np.zeros(self.shape, dtype=np.int8)
        return np.rint(self.coeffs.real / self.gamma_r).astype(np.int8)

    def reflecting(self):
        return np.abs(self.coeffs) > 0

    def to_text(self):
        """One line per panel row: ``+`` / ``−`` / ``·`` for OFF / ON / absorb."""
        if self.provenance == "continuous":
            raise ValueError("continuous configurations have no symbol grid")
        sym = {1: "+", -1: "−", 0: "·"}
        return "\n".join("".join(sym[int(s)] for s in row) for row in self.states()) + "\n"

    def csv_rows(self):
        rows, cols = self.shape
        for m in range(rows):
            for n in range(cols):
                c = self.coeffs[m, n]
                yield m + 1, n + 1, float(c.real), float(c.imag)


@dataclass(frozen=True)
class ZoneBand:
    i: int
    xi: float
    tau: float = 0.5

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError(f"xi must be positive, got {self.xi}")
        if not 0 < self.tau <= 0.5:
            raise DomainError(f"tau must lie in (0, 0.5], got {self.tau}")


def upsilon(t, gamma_r):
    """Step composition ``eps(t - G) - eps(-G - t)`` with ``eps(0) = 1``.

    A relative slack of 1e-9 absorbs rounding in sums of +/- gamma_r.
    """
    t = np.asarray(t, dtype=float)
    slack = 1e-9 * gamma_r
    return ((t - gamma_r >= -slack).astype(np.int8) - (-gamma_r - t >= -slack).astype(np.int8))


def aggregate(per_zone, gamma_r=None, provenance="tposj"):
    """Sum per-zone matrices element-wise and map back to ``{-G, 0, +G}``."""
    per_zone = list(per_zone)
    if not per_zone:
        raise DomainError("aggregate needs at least one matrix")
    shape = per_zone[0].shape
    if any(c.shape != shape for c in per_zone):
        raise DomainError("all matrices passed to aggregate must share one shape")
    g = per_zone[0].gamma_r if gamma_r is None else gamma_r
    total = np.zeros(shape)
    for c in per_zone:
        total += c.coeffs.real
    return ConfigMatrix.from_states(upsilon(total, g), g, provenance)


class PairGeometry:
    """Element positions and zone indices of one panel seen by one (Tx, Rx) pair."""

    def __init__(self, panel, tx_world, rx_world, lam, model="exact"):
        self.panel = panel
        self.lam = lam
        self.model = model
        tx_l = panel.to_local(tx_world)
        rx_l = panel.to_local(rx_world)
        self.frame = build_b_frame(tx_l, rx_l)
        centers = panel.element_centers_local().reshape(-1, 3)
        pb = self.frame.to_b(centers)
        self.px = np.ascontiguousarray(pb[:, 0])
        self.py = np.ascontiguousarray(pb[:, 1])
        _, self.findex = excess_path(centers, tx_l, rx_l, lam)
        cols = panel.cols
        self.corners = np.array([r * cols + c for r, c in panel.corner_indices()])
        _, center_f = excess_path(np.zeros(3), tx_l, rx_l, lam)
        self.seed_f = np.append(self.findex[self.corners], center_f)
        self.evaluations = 0

    @property
    def size(self):
        return self.px.size

    def reach(self, xi):
        # path excess is 2-Lipschitz in the element position: an element whose
        # index differs from i by more than 4 xi / lam is farther than xi from
        # curve i.  The bound only holds for the exact radius model.
        return 4.0 * xi / self.lam + 1e-9

    def zone_window(self, xi):
        """Every zone index that can pass within ``xi`` of some element."""
        if self.model != "exact":
            return np.arange(seed_zones(self).start, seed_zones(self).stop)
        r = self.reach(xi)
        lo = max(1, int(math.floor(self.findex.min() - r)))
        hi = max(lo, int(math.ceil(self.findex.max() + r)))
        return np.arange(lo, hi + 1)

    def pairs(self, zones, xi, subset=None):
        """Candidate (element, zone) pairs for the zones in ``zones``."""
        zones = np.asarray(zones, dtype=np.int64)
        idx = np.arange(self.size) if subset is None else np.asarray(subset)
        if zones.size == 0 or idx.size == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        if self.model != "exact":
            return np.repeat(idx, zones.size), np.tile(zones, idx.size)
        zset = np.zeros(zones.max() - zones.min() + 1, dtype=bool)
        zset[zones - zones.min()] = True
        r = self.reach(xi)
        f = self.findex[idx]
        lo = np.maximum(np.ceil(f - r).astype(np.int64), zones.min())
        hi = np.minimum(np.floor(f + r).astype(np.int64), zones.max())
        counts = np.maximum(hi - lo + 1, 0)
        elem = np.repeat(idx, counts)
        offs = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        zone = np.repeat(lo, counts) + offs
        keep = zset[zone - zones.min()]
        return elem[keep], zone[keep]

    def distances(self, elem, zone):
        """Element-to-curve distances for paired arrays; counts each as one judgement."""
        self.evaluations += elem.size
        out = np.full(elem.size, np.inf)
        if elem.size == 0:
            return out
        zs, inv = np.unique(zone, return_inverse=True)
        cx, ax, by, _, _, valid = zone_ellipse_arrays(self.frame, zs, self.lam, self.model)
        ok = valid[inv]
        if np.any(ok):
            k = inv[ok]
            out[ok] = kernels.ellipse_min_distance(self.px[elem[ok]], self.py[elem[ok]],
                                                   cx[k], ax[k], by[k], GRID_CURVE, CURVE_TOL)
        return out

    def hits(self, zones, xi, subset=None):
        """(element, zone) pairs whose distance is within ``xi``."""
        elem, zone = self.pairs(zones, xi, subset)
        near = self.distances(elem, zone) <= xi
        return elem[near], zone[near]

    def zone_states(self, i, xi):
        """Flat ``{-1, 0, +1}`` states of zone ``i``'s judgement pass."""
        states = np.zeros(self.size, dtype=np.int8)
        elem, _ = self.hits([i], xi)
        states[elem] = 1 if i % 2 else -1
        return states


def _golden_max(fun, lo, hi, iters=40):
    """Vectorized golden-section maximization, one bracket per entry."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)
    c, d = hi - inv_phi * (hi - lo), lo + inv_phi * (hi - lo)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        right = fc > fd
        hi, lo = np.where(right, d, hi), np.where(right, lo, c)
        c, d = (np.where(right, hi - inv_phi * (hi - lo), d),
                np.where(right, c, lo + inv_phi * (hi - lo)))
        fx = fun(np.where(right, c, d))
        fc, fd = np.where(right, fx, fd), np.where(right, fc, fx)
    return np.maximum(fc, fd)


def threshold_xi(frame, tau, candidate_zones, lam, model="exact", panel=None, n_grid=GRID_XI):
    """Largest gap between the ``i`` and ``i + tau`` curves at a common ``d1``.

    The maximum runs over the candidate zones and over ``d1`` values where the
    radicand is positive.  When ``panel`` is given, only ``d1`` values whose
    curve point falls on the panel aperture count: the unrestricted maximum
    sits at the curve's tangent point on the ground-projection line, usually
    far from the panel.
    """
    if not 0 < tau <= 0.5:
        raise DomainError(f"tau must lie in (0, 0.5], got {tau}")
    zones = np.array([int(i) for i in candidate_zones if int(i) >= 1], dtype=float)
    if not len(list(candidate_zones)):
        raise DomainError("candidate_zones must be non-empty")
    _, _, _, lo, hi, valid = zone_ellipse_arrays(frame, zones, lam, model)
    zones, lo, hi = zones[valid], lo[valid], hi[valid]
    if zones.size == 0:
        raise InfeasibleThresholdError("no candidate zone has a feasible d1")
    zcol = zones[:, None]

    def on_panel(d1, rad_i):
        if panel is None:
            return np.ones(np.shape(d1), dtype=bool)
        vx = foot_x(frame, d1)
        vy = np.sqrt(np.maximum(rad_i, 0.0))
        inside = np.zeros(np.shape(d1), dtype=bool)
        for sign in (1.0, -1.0):
            loc = frame.from_b(np.stack([vx, sign * vy, np.zeros_like(vx)], axis=-1))
            inside |= panel.contains_local(loc[..., 0], loc[..., 1])
        return inside

    def gap(i, d1):
        r_i = radicand(frame, i, d1, lam, model)
        r_t = radicand(frame, i + tau, d1, lam, model)
        ok = (r_i > 0) & on_panel(d1, r_i)
        val = np.sqrt(np.maximum(r_t, 0.0)) - np.sqrt(np.maximum(r_i, 0.0))
        return np.where(ok, val, -np.inf)

    u = (np.arange(n_grid) + 0.5) / n_grid
    d1 = lo[:, None] + (hi - lo)[:, None] * u[None, :]
    g = gap(zcol, d1)
    k = np.argmax(g, axis=1)
    rows = np.arange(zones.size)
    best_grid = g[rows, k]
    feasible = np.isfinite(best_grid)
    if not np.any(feasible):
        raise InfeasibleThresholdError("no candidate zone has a feasible d1 on the panel")
    a = np.where(k > 0, d1[rows, np.maximum(k - 1, 0)], lo)
    b = np.where(k < n_grid - 1, d1[rows, np.minimum(k + 1, n_grid - 1)], hi)
    refined = _golden_max(lambda x: gap(zones, x), a, b)
    return float(max(best_grid[feasible].max(), refined[feasible].max()))


def seed_zones(geom, pad=2):
    """Zones around the corner and centre fractional indices."""
    lo = max(1, int(math.floor(geom.seed_f.min())) - pad)
    hi = int(math.ceil(geom.seed_f.max())) + pad
    return range(lo, hi + 1)


def _bounds_from_hits(geom, elem, zone):
    if zone.size == 0:
        return None
    i_l = int(zone.min())
    at_corner = np.isin(elem, geom.corners)
    i_u = int(zone[at_corner].max()) if np.any(at_corner) else int(zone.max())
    return i_l, max(i_l, i_u)


def zone_bounds(frame, panel, xi, lam, model="exact", geom=None):
    """Lowest and highest zone index whose curve passes within ``xi`` of the panel.

    ``i_l`` is the lowest zone near any element; ``i_u`` the highest zone near
    one of the four corner elements.  Returns None when no zone comes within
    ``xi`` of any element.
    """
    if geom is None:
        geom = _geometry_from_frame(frame, panel, lam, model)
    return _bounds_from_hits(geom, *geom.hits(geom.zone_window(xi), xi))


def _geometry_from_frame(frame, panel, lam, model):
    tx_l = frame.from_b(frame.tx_b)
    rx_l = frame.from_b(frame.rx_b)
    return PairGeometry(panel, panel.to_world(tx_l), panel.to_world(rx_l), lam, model)


def judge_element(p_b, frame, band, lam, gamma_r, model="exact"):
    """Judgement of one B-frame element center against one zone band."""
    dist = min_distance_to_zone_curve(p_b, frame, band.i, lam, model, GRID_CURVE, CURVE_TOL)
    if dist <= band.xi:
        state = ElementState.OFF if band.i % 2 else ElementState.ON
    else:
        state = ElementState.ABSORB
    return ElementCoefficient(state, gamma_r)


def zone_matrix(frame, panel, band, lam, gamma_r, model="exact", geom=None):
    """Per-zone matrix: ``+/-gamma_r`` within ``band.xi`` of curve ``band.i``, else 0."""
    if geom is None:
        geom = _geometry_from_frame(frame, panel, lam, model)
    states = geom.zone_states(band.i, band.xi).reshape(panel.shape)
    return ConfigMatrix.from_states(states, gamma_r, "tposj", zone=band.i)


@dataclass
class PairResult:
    antenna: int
    panel: int
    xi: float
    bounds: tuple
    states: np.ndarray
    evaluations: int


@dataclass
class TposjResult:
    configs: list
    pairs: list

    @property
    def evaluations(self):
        return sum(p.evaluations for p in self.pairs)


def configure_pair(geom, tau, gamma_r, xi=None):
    """Run the single-pair procedure; returns ``(states, xi, bounds)``.

    Zone passes are evaluated together: every candidate (element, zone) pair
    in the zone window is judged once, then passes outside ``[i_l, i_u]`` are
    dropped and the rest summed and clipped.
    """
    if xi is None:
        zones = seed_zones(geom)
        try:
            xi = threshold_xi(geom.frame, tau, zones, geom.lam, geom.model, geom.panel)
        except InfeasibleThresholdError:
            # no curve point of the seed zones lands on the aperture
            xi = threshold_xi(geom.frame, tau, zones, geom.lam, geom.model)
    elem, zone = geom.hits(geom.zone_window(xi), xi)
    bounds = _bounds_from_hits(geom, elem, zone)
    total = np.zeros(geom.size, dtype=np.int64)
    if bounds is not None:
        keep = (zone >= bounds[0]) & (zone <= bounds[1])
        np.add.at(total, elem[keep], np.where(zone[keep] % 2 == 1, 1, -1))
    states = upsilon(total.astype(float), 1.0)
    return states.reshape(geom.panel.shape), xi, bounds


def tposj(scenario, rx=None, xi=None):
    """Configure every panel from positions alone.

    ``rx`` overrides the scenario's receiver (the position the transmitter
    believes in); ``xi`` overrides the threshold, as does ``scenario.fixed_xi``.
    """
    rx = scenario.rx if rx is None else np.asarray(rx, dtype=float)
    xi = scenario.fixed_xi if xi is None else xi
    lam = scenario.lam
    configs, pairs = [], []
    for c, panel in enumerate(scenario.panels):
        total = np.zeros(panel.shape, dtype=np.int32)
        for b, tx in enumerate(scenario.tx_antennas):
            geom = PairGeometry(panel, tx, rx, lam, scenario.radius_model)
            states, xi_used, bounds = configure_pair(geom, scenario.tau, scenario.gamma_r, xi)
            pairs.append(PairResult(b, c, xi_used, bounds, states, geom.evaluations))
            total += states
        final = np.clip(total, -1, 1).astype(np.int8)
        configs.append(ConfigMatrix.from_states(final, scenario.gamma_r, "tposj"))
    return TposjResult(configs, pairs)


def baseline_random(panel, gamma_r, seed, continuous=False):
    """Independent random states per element; binary +/-gamma_r unless ``continuous``."""
    rng = np.random.default_rng(seed)
    if continuous:
        phase = rng.uniform(0.0, 2.0 * math.pi, size=panel.shape)
        return ConfigMatrix(gamma_r * np.exp(1j * phase), "random", gamma_r, {"seed": seed})
    states = np.where(rng.random(panel.shape) < 0.5, 1, -1).astype(np.int8)
    return ConfigMatrix.from_states(states, gamma_r, "random", seed=seed)


def quantize_onebit(phase):
    """Nearest of {0, pi} to each phase; exact ties go to 0."""
    wrapped = np.mod(phase, 2.0 * math.pi)
    dist0 = np.minimum(wrapped, 2.0 * math.pi - wrapped)
    return np.where(dist0 <= math.pi / 2.0, 1, -1).astype(np.int8)


def baseline_beamform(scenario, panel_index=0, resolution="continuous", rx=None, los=None,
                      reference=None):
    """Near-field beamforming from the per-element channel toward ``rx``.

    Each element cancels the phase of its own channel and adds the target
    phase: that of the direct path in LoS, and in NLoS the channel phase of
    the centre element, which therefore keeps phase 0.  ``reference`` adds a
    constant offset to the target.  ``onebit`` keeps the nearer of {0, pi}.
    """
    from .field import direct_field, element_channels

    if resolution not in ("continuous", "onebit"):
        raise DomainError(f"resolution must be 'continuous' or 'onebit', got {resolution!r}")
    los = scenario.los if los is None else los
    sc = scenario if rx is None else scenario.with_rx(rx)
    h = element_channels(sc)[panel_index]
    if los:
        target = np.angle(direct_field(sc))
    else:
        target = np.angle(h[h.shape[0] // 2, h.shape[1] // 2])
    if reference is not None:
        target = target + reference
    psi = target - np.angle(h)
    g = scenario.gamma_r
    if resolution == "continuous":
        return ConfigMatrix(g * np.exp(1j * psi), "continuous", g)
    return ConfigMatrix.from_states(quantize_onebit(psi), g, "onebit")
