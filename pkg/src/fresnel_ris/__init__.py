"""Position-aided Fresnel-zone configuration of reconfigurable intelligent surfaces."""

from .config import (ConfigMatrix, ElementState, baseline_beamform, baseline_random,
                     threshold_xi, tposj, upsilon)
from .geometry import PanelSpec, build_b_frame, fraunhofer_array, fraunhofer_element
from .scenario import Scenario, load_scenario, default_scenario

__version__ = "0.1.0"

__all__ = [
    "ConfigMatrix", "ElementState", "PanelSpec", "Scenario", "baseline_beamform",
    "baseline_random", "build_b_frame", "fraunhofer_array", "fraunhofer_element",
    "load_scenario", "default_scenario", "threshold_xi", "tposj", "upsilon",
]
