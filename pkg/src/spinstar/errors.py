"""Typed exceptions shared across the package."""


class SpinStarError(Exception):
    """Base class for all package-specific errors."""


class DimensionTooLargeError(SpinStarError):
    """Full-Hilbert oracle requested for a bath too large to diagonalize."""


class GridTooShortError(SpinStarError):
    """Time grid has too few points for the requested operation."""


class ResonanceError(SpinStarError):
    """Asymptotic expansion requested at an exact resonance where it diverges."""


class ValidityRegionError(SpinStarError):
    """Coupling lies inside the interval where the Taylor expansion diverges."""


class ArccosDomainError(SpinStarError):
    """Half-maximum equation has no solution (arccos argument outside [-1, 1])."""


class AlphaXDegenerateError(SpinStarError):
    """Analytic FWHM is 0/0 for a pure z-like pair; use the numeric extractor."""


class NoCollapseRevivalError(SpinStarError):
    """Collapse-revival time scales requested where the pattern does not exist."""


class InsufficientSpanError(SpinStarError):
    """Series does not span enough collapse-revival periods to measure."""


class NoPeakFoundError(SpinStarError):
    """No slow-envelope peak found in the series (e.g. flat or unmodulated)."""


class ConfigError(SpinStarError):
    """Scenario configuration file is malformed or inconsistent."""
