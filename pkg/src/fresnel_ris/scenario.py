"""Scenario description, defaults and TOML scenario files.

Scenario files are TOML with explicit units in key names, e.g.::

    frequency_hz = 28e9
    tx_antennas_m = [[10, 10, 15]]
    rx_m = [-10, 10, 1.5]

    [[panels]]
    rows = 80
    cols = 80

Keys left out take the default simulation parameters below.  Unknown keys
are rejected so that typos surface immediately.
"""

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import DomainError, ScenarioError
from .geometry import RADIUS_MODELS, PanelSpec, as_point
from .units import dbm_to_w, wavelength

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

DEFAULT_FREQUENCY_HZ = 28e9
DEFAULT_TX = (10.0, 10.0, 15.0)
DEFAULT_RX = (-10.0, 10.0, 1.5)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Everything needed to configure a panel set and evaluate the link."""

    frequency_hz: float = DEFAULT_FREQUENCY_HZ
    tx_antennas: tuple = (np.array(DEFAULT_TX),)
    rx: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_RX))
    panels: tuple = ()
    gamma_r: float = 0.9
    tau: float = 0.5
    fixed_xi: float = None
    tx_boresight_gain_dbi: float = 15.0
    noise_dbm: float = -90.0
    tx_power_dbm: float = 30.0
    los: bool = False
    boresight_panel: int = 0
    radius_model: str = "exact"
    name: str = "default"

    def __post_init__(self):
        txs = tuple(as_point(t, "tx antenna") for t in self.tx_antennas)
        if not txs:
            raise DomainError("scenario needs at least one Tx antenna")
        object.__setattr__(self, "tx_antennas", txs)
        object.__setattr__(self, "rx", as_point(self.rx, "rx"))
        if not self.panels:
            lam = wavelength(self.frequency_hz)
            object.__setattr__(self, "panels", (PanelSpec(80, 80, lam / 2, lam / 2),))
        else:
            object.__setattr__(self, "panels", tuple(self.panels))
        if not 0.0 <= self.gamma_r <= 1.0:
            raise DomainError(f"gamma_r must lie in [0, 1], got {self.gamma_r}")
        if not 0.0 < self.tau <= 0.5:
            raise DomainError(f"tau must lie in (0, 0.5], got {self.tau}")
        if self.fixed_xi is not None and not self.fixed_xi > 0:
            raise DomainError(f"fixed_xi must be positive, got {self.fixed_xi}")
        if not 0 <= self.boresight_panel < len(self.panels):
            raise DomainError(f"boresight_panel {self.boresight_panel} out of range")
        if self.radius_model not in RADIUS_MODELS:
            raise DomainError(f"radius_model must be one of {RADIUS_MODELS}")

    @property
    def lam(self):
        return wavelength(self.frequency_hz)

    @property
    def tx_power_w(self):
        return dbm_to_w(self.tx_power_dbm)

    @property
    def noise_w(self):
        return dbm_to_w(self.noise_dbm)

    def replace(self, **changes):
        return replace(self, **changes)

    def with_rx(self, rx):
        return replace(self, rx=np.asarray(rx, dtype=float))

    def to_dict(self):
        """Fully resolved, JSON-friendly description (the inverse of :func:`scenario_from_dict`)."""
        return {
            "name": self.name,
            "frequency_hz": self.frequency_hz,
            "tx_antennas_m": [t.tolist() for t in self.tx_antennas],
            "rx_m": self.rx.tolist(),
            "panels": [
                {
                    "rows": p.rows,
                    "cols": p.cols,
                    "elem_a_m": p.elem_a,
                    "elem_b_m": p.elem_b,
                    "origin_m": p.origin.tolist(),
                    "orientation": p.orientation.tolist(),
                }
                for p in self.panels
            ],
            "gamma_r": self.gamma_r,
            "tau": self.tau,
            "fixed_xi_m": self.fixed_xi,
            "tx_boresight_gain_dbi": self.tx_boresight_gain_dbi,
            "noise_dbm": self.noise_dbm,
            "tx_power_dbm": self.tx_power_dbm,
            "los": self.los,
            "boresight_panel": self.boresight_panel,
            "radius_model": self.radius_model,
        }

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def default_scenario(**overrides):
    """The default 28 GHz single-panel scenario (80 x 80 half-wavelength elements)."""
    return Scenario(**overrides)


# experiment-level keys live next to the scenario keys in the same file
RUN_KEYS = {
    "seed": 0,
    "trials": 1000,
    "sigma_m": [0.0, 0.0, 0.0],
    "p_dbm_min": 0.0,
    "p_dbm_max": 30.0,
    "p_dbm_step": 5.0,
    "waypoints_m": None,
    "speed_kmh": 4.0,
    "slot_ms": 1.0,
    "slots": 200,
}

_SCENARIO_KEYS = {
    "name", "frequency_hz", "tx_antennas_m", "rx_m", "panels", "gamma_r", "tau",
    "fixed_xi_m", "tx_boresight_gain_dbi", "noise_dbm", "tx_power_dbm", "los",
    "boresight_panel", "radius_model",
}
_PANEL_KEYS = {"rows", "cols", "elem_a_m", "elem_b_m", "origin_m", "orientation"}


def _panel_from_dict(d, lam):
    unknown = set(d) - _PANEL_KEYS
    if unknown:
        raise ScenarioError(f"unknown panel keys: {sorted(unknown)}")
    return PanelSpec(
        rows=d.get("rows", 80),
        cols=d.get("cols", 80),
        elem_a=d.get("elem_a_m", lam / 2),
        elem_b=d.get("elem_b_m", lam / 2),
        origin=np.asarray(d.get("origin_m", [0.0, 0.0, 0.0]), dtype=float),
        orientation=np.asarray(d.get("orientation", np.eye(3)), dtype=float),
    )


def scenario_from_dict(d):
    """Split a mapping into ``(Scenario, run_options)``; raises ScenarioError on bad input."""
    unknown = set(d) - _SCENARIO_KEYS - set(RUN_KEYS)
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    run = {k: d.get(k, v) for k, v in RUN_KEYS.items()}
    kw = {}
    try:
        freq = float(d.get("frequency_hz", DEFAULT_FREQUENCY_HZ))
        lam = wavelength(freq)
        kw["frequency_hz"] = freq
        if "tx_antennas_m" in d:
            kw["tx_antennas"] = tuple(np.asarray(t, dtype=float) for t in d["tx_antennas_m"])
        if "rx_m" in d:
            kw["rx"] = np.asarray(d["rx_m"], dtype=float)
        if "panels" in d:
            kw["panels"] = tuple(_panel_from_dict(p, lam) for p in d["panels"])
        simple = {"name": str, "gamma_r": float, "tau": float, "tx_boresight_gain_dbi": float,
                  "noise_dbm": float, "tx_power_dbm": float, "los": bool,
                  "boresight_panel": int, "radius_model": str}
        for key, cast in simple.items():
            if key in d:
                kw[key] = cast(d[key])
        if d.get("fixed_xi_m") is not None:
            kw["fixed_xi"] = float(d["fixed_xi_m"])
        scenario = Scenario(**kw)
        run["seed"] = int(run["seed"])
        run["trials"] = int(run["trials"])
        if run["trials"] < 1:
            raise ScenarioError("trials must be >= 1")
        run["sigma_m"] = [float(s) for s in run["sigma_m"]]
        if len(run["sigma_m"]) != 3 or min(run["sigma_m"]) < 0:
            raise ScenarioError("sigma_m must be three non-negative numbers")
    except ScenarioError:
        raise
    except (TypeError, ValueError, DomainError) as exc:
        raise ScenarioError(str(exc)) from exc
    return scenario, run


def load_scenario(path):
    """Read a TOML scenario file into ``(Scenario, run_options)``."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"malformed scenario {path}: {exc}") from exc
    return scenario_from_dict(data)
