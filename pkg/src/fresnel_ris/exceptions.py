class FresnelRISError(Exception):
    """Base class for all package errors."""


class DomainError(FresnelRISError, ValueError):
    """An argument lies outside the domain of a formula."""


class DegenerateFrameError(FresnelRISError):
    """Tx and Rx share a ground projection, so the zone frame is undefined."""


class InfeasibleThresholdError(FresnelRISError):
    """No (zone, d1) pair satisfies the radicand constraint of the threshold search."""


class ShadowedElementError(FresnelRISError):
    """A Tx or Rx lies behind the panel as seen from an element."""


class ScenarioError(FresnelRISError, ValueError):
    """A scenario file or mapping failed validation."""
