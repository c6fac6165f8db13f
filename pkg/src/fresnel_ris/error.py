"""Receiver position error: sampling, ellipsoid perturbation and Monte-Carlo SE.

Errors are drawn in the B-frame of the first (Tx antenna, panel) pair, so
``e_x`` runs along the ground projection of the Rx->Tx line and ``e_z`` along
the panel normal.  Trial ``t`` of a run seeded with ``s`` draws from
``numpy.random.default_rng([s, t])``; the seed sequence hashes the pair, so
distinct pairs give independent streams and results do not depend on the
order or the thread in which trials run.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import baseline_beamform, baseline_random, tposj
from .exceptions import DegenerateFrameError, DomainError
from .field import Link
from .geometry import build_b_frame, rotation_z

CONFIGURATORS = ("tposj", "onebit", "continuous", "random")


@dataclass(frozen=True)
class ErrorModel:
    sigma: tuple = (0.0, 0.0, 0.0)
    seed: int = 0

    def __post_init__(self):
        sigma = tuple(float(s) for s in self.sigma)
        if len(sigma) != 3 or min(sigma) < 0 or not all(map(math.isfinite, sigma)):
            raise DomainError(f"sigma must be three finite non-negative numbers, got {self.sigma}")
        object.__setattr__(self, "sigma", sigma)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def isotropic(cls, sigma, seed=0):
        return cls((sigma, sigma, sigma), seed)

    @classmethod
    def single_axis(cls, axis, sigma, seed=0):
        s = [0.0, 0.0, 0.0]
        s["xyz".index(axis)] = sigma
        return cls(tuple(s), seed)

    @property
    def is_zero(self):
        return not any(self.sigma)


def sample_error(model, trial):
    """B-frame error vector of one trial."""
    sigma = np.asarray(model.sigma)
    rng = np.random.default_rng([model.seed, int(trial)])
    draw = rng.standard_normal(3)
    return np.where(sigma > 0, draw * sigma, 0.0)


def error_to_world(e_b, scenario):
    """Rotate a B-frame error (first antenna, first panel) into world coordinates."""
    panel = scenario.panels[0]
    frame = build_b_frame(panel.to_local(scenario.tx_antennas[0]), panel.to_local(scenario.rx))
    local = np.asarray(e_b, dtype=float) @ rotation_z(frame.chi)
    return local @ panel.orientation.T


@dataclass(frozen=True)
class EllipsoidParams:
    """Zone spheroid with foci Tx and (estimated) Rx.

    ``l_a``, ``l_b`` and ``l_c`` keep the literal published axis expressions,
    which are not consistent with ``b^2 = a^2 - c^2``; all computation uses
    ``a_ex`` and ``b_ex``.
    """

    center: np.ndarray
    beta: float
    l_a: float
    l_b: float
    l_c: float
    a_ex: float
    b_ex: float
    axis: np.ndarray

    def points(self, u, v):
        """Spheroid points at polar angle ``u`` from the focal axis and azimuth ``v``."""
        u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        e1 = self.axis
        helper = np.array([0.0, 0.0, 1.0]) if abs(e1[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        e2 = np.cross(e1, helper)
        e2 /= np.linalg.norm(e2)
        e3 = np.cross(e1, e2)
        return (self.center + (self.a_ex * np.cos(u))[..., None] * e1
                + (self.b_ex * np.sin(u) * np.cos(v))[..., None] * e2
                + (self.b_ex * np.sin(u) * np.sin(v))[..., None] * e3)


def ellipsoid_params(i, tx_b, rx_estimated_b, lam):
    tx = np.asarray(tx_b, dtype=float)
    rx = np.asarray(rx_estimated_b, dtype=float)
    diff = tx - rx
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        raise DegenerateFrameError("coincident foci")
    dx = rx[0] - tx[0]
    beta = math.atan((rx[2] - tx[2]) / dx) if dx != 0 else math.copysign(math.pi / 2, rx[2] - tx[2])
    a_ex = 0.5 * (d + 0.5 * i * lam)
    b_ex = math.sqrt(a_ex * a_ex - 0.25 * d * d)
    return EllipsoidParams(
        center=0.5 * (tx + rx), beta=beta,
        l_a=d + 0.5 * i * lam, l_b=0.5 * i * lam * d, l_c=0.5 * i * lam * d,
        a_ex=a_ex, b_ex=b_ex, axis=diff / d,
    )


def predicted_intersection_shift(error, frame):
    """Leading-order shift ``(dx, dy)`` of the zone curves for an Rx error (B-frame)."""
    e = np.asarray(error, dtype=float)
    tan_beta = (frame.zt - frame.zr) / frame.xt
    if abs(tan_beta) > 10:
        warnings.warn(f"tan(beta) = {tan_beta:.3g}; the small-error expansion is ill-conditioned",
                      RuntimeWarning, stacklevel=2)
    return 0.5 * (e[0] + e[2] * tan_beta), 0.5 * e[1]


@dataclass
class MCStats:
    configurator: str
    sigma: tuple
    seed: int
    trials: int
    mean: float
    std: float
    q05: float
    q50: float
    q95: float
    values: np.ndarray

    @property
    def stderr(self):
        return self.std / math.sqrt(self.trials)

    def row(self):
        return {"configurator": self.configurator, "sigma_x": self.sigma[0],
                "sigma_y": self.sigma[1], "sigma_z": self.sigma[2], "mean_se": self.mean,
                "std_se": self.std, "q05": self.q05, "q50": self.q50, "q95": self.q95,
                "trials": self.trials, "seed": self.seed}


def summarize(values, configurator, model):
    values = np.asarray(values, dtype=float)
    n = values.size
    mean = math.fsum(values) / n
    var = math.fsum((values - mean) ** 2) / (n - 1) if n > 1 else 0.0
    q05, q50, q95 = np.quantile(np.sort(values), [0.05, 0.5, 0.95])
    return MCStats(configurator, model.sigma, model.seed, n, mean, math.sqrt(var),
                   float(q05), float(q50), float(q95), values)


def configure(scenario, configurator, rx_estimate, xi=None, seed=None):
    """Per-panel configurations produced from an estimated Rx position."""
    if configurator == "tposj":
        return tposj(scenario, rx=rx_estimate, xi=xi).configs
    if configurator in ("onebit", "continuous"):
        return [baseline_beamform(scenario, c, configurator, rx=rx_estimate)
                for c in range(len(scenario.panels))]
    if configurator == "random":
        return [baseline_random(p, scenario.gamma_r, [*np.atleast_1d(seed), c])
                for c, p in enumerate(scenario.panels)]
    raise DomainError(f"unknown configurator {configurator!r}; expected one of {CONFIGURATORS}")


def trial_se(scenario, configurator, model, trial, link, xi=None):
    e_world = error_to_world(sample_error(model, trial), scenario)
    cfg = configure(scenario, configurator, scenario.rx + e_world, xi,
                    seed=[model.seed, int(trial)])
    return link.evaluate(cfg).se_bps_hz


def monte_carlo_se(scenario, configurator, model, trials, threads=1, xi=None, link=None):
    """Configure from erroneous Rx estimates, evaluate at the true Rx, summarize SE.

    A zero-sigma model skips resampling for deterministic configurators: every
    trial would reproduce the error-free value.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if configurator not in CONFIGURATORS:
        raise DomainError(f"unknown configurator {configurator!r}; expected one of {CONFIGURATORS}")
    link = Link(scenario) if link is None else link
    if model.is_zero and configurator != "random":
        se = trial_se(scenario, configurator, model, 0, link, xi)
        return summarize(np.full(trials, se), configurator, model)

    def run(t):
        return trial_se(scenario, configurator, model, t, link, xi)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(run, range(trials)))
    else:
        values = [run(t) for t in range(trials)]
    return summarize(values, configurator, model)
