"""spinstar: exact reduced dynamics and information-flow analysis of a
central spin isotropically coupled to a finite spin bath."""

from .asymptotics import (AsymptoticCoefficients, EnvelopeSample, coefficients,
                          coherence_reconstruct, envelope_general, envelope_x,
                          envelope_z, p_functions, validity_interval, xi_phases,
                          xi_sum_closed, xi_sum_direct)
from .distances import (X_PAIR, Z_PAIR, DistanceSeries, PairCoefficients,
                        blp_measure_windowed, distance_general, distance_series,
                        distance_x, distance_z, sigma_series)
from .dynamics import (ORACLE_MAX_BATH, BlochVector, PropagatorGrid,
                       PropagatorSample, evolve_bloch, full_hilbert_evolve,
                       full_hilbert_propagator, propagator_grid, propagator_sample)
from .errors import (AlphaXDegenerateError, ArccosDomainError, ConfigError,
                     DimensionTooLargeError, GridTooShortError,
                     InsufficientSpanError, NoCollapseRevivalError,
                     NoPeakFoundError, ResonanceError, SpinStarError,
                     ValidityRegionError)
from .master_eq import (RateSample, bloch_rhs, propagator_derivatives, rates,
                        rates_grid)
from .model import (ModelParams, SubspaceSpectrum, ThermalWeights,
                    compute_spectrum, thermal_weights)
from .timescales import (CollapseRevivalReport, PeriodReport, fwhm_analytic,
                         fwhm_numeric, period)

__version__ = "0.1.0"

__all__ = [
    "AlphaXDegenerateError",
    "ArccosDomainError",
    "AsymptoticCoefficients",
    "BlochVector",
    "CollapseRevivalReport",
    "ConfigError",
    "DimensionTooLargeError",
    "DistanceSeries",
    "EnvelopeSample",
    "GridTooShortError",
    "InsufficientSpanError",
    "ModelParams",
    "NoCollapseRevivalError",
    "NoPeakFoundError",
    "ORACLE_MAX_BATH",
    "PairCoefficients",
    "PeriodReport",
    "PropagatorGrid",
    "PropagatorSample",
    "RateSample",
    "ResonanceError",
    "SpinStarError",
    "SubspaceSpectrum",
    "ThermalWeights",
    "ValidityRegionError",
    "X_PAIR",
    "Z_PAIR",
    "__version__",
    "blp_measure_windowed",
    "bloch_rhs",
    "coefficients",
    "coherence_reconstruct",
    "compute_spectrum",
    "distance_general",
    "distance_series",
    "distance_x",
    "distance_z",
    "envelope_general",
    "envelope_x",
    "envelope_z",
    "evolve_bloch",
    "full_hilbert_evolve",
    "full_hilbert_propagator",
    "fwhm_analytic",
    "fwhm_numeric",
    "p_functions",
    "period",
    "propagator_derivatives",
    "propagator_grid",
    "propagator_sample",
    "rates",
    "rates_grid",
    "sigma_series",
    "thermal_weights",
    "validity_interval",
    "xi_phases",
    "xi_sum_closed",
    "xi_sum_direct",
]
