"""Collapse-revival period, peak/revival/collapse times, and envelope extrema.

The collapse-revival pattern repeats with period T_cr = 2 pi / |nu_cr|;
revival duration is measured as the full width at half maximum (FWHM) of a
slow-envelope peak, and the collapse time is the remainder of the period.

The analytic FWHM solves the half-maximum condition on the lowest-order
squared-distance envelope  G(theta) = Q + (R + S)/P_-(theta)  (theta =
nu_cr t), keeping the x-part R = alpha_x (cosh b - 1)/4 and the mean
Q = alpha_z/4 and dropping the O(1/N) z-amplitude S.  The crossing angle

    P_-(theta_half) = R / (G_half - Q),
    G_half = ((sqrt(Q + R/P_-min) + sqrt(Q + R/P_-max)) / 2)^2,

then depends only on alpha_x/alpha_z and omega_b/T, so t_r, t_c and T_cr all
scale identically with N and the ratio t_c/t_r is exactly N-independent, as
the large-N analysis asserts.  (The quoted auxiliary w carries an algebra
slip -- its delta disagrees with the envelope half-maximum it is meant to
solve by more than a factor 2 -- so w is reported here as the value that
makes the arccos form  delta = arccos(cosh b - 8 alpha_x sinh^2 b / w)/nu_cr
exact for the implemented crossing; see the numeric cross-check.)

The numeric extractor measures the same quantities directly from a sampled
distance series via sliding-window envelope extraction, and is the oracle
the analytic forms are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d
from scipy.signal import find_peaks

from .asymptotics import AsymptoticCoefficients, dz_mean
from .distances import DistanceSeries, PairCoefficients
from .errors import (AlphaXDegenerateError, ArccosDomainError, InsufficientSpanError,
                     NoCollapseRevivalError, NoPeakFoundError)
from .model import ModelParams

__all__ = [
    "PeriodReport",
    "CollapseRevivalReport",
    "period",
    "fwhm_analytic",
    "fwhm_numeric",
]


@dataclass(frozen=True)
class PeriodReport:
    """Collapse-revival period and its regime approximations.

    ``exists`` is the existence condition g != 0 and Delta != 0; when false,
    t_cr is +inf (the pattern never repeats).  ``scale_separation`` is
    nu_0/|nu_cr|, the number of fast radians per slow radian; values of
    order one or below mean no visible collapse-revival structure even
    though ``exists`` holds (e.g. at g N / Delta = 1/2, where the order-one
    regime approximation of the period vanishes).
    """

    t_cr: float
    exists: bool
    regime: str
    c_ratio: float
    approx_large_gn: float
    approx_order_one_c: float
    approx_small_gn: float
    scale_separation: float


@dataclass(frozen=True)
class CollapseRevivalReport:
    """Time scales and envelope extrema of the collapse-revival pattern."""

    t_cr: float
    t_p: float
    delta: float
    t_r: float
    t_c: float
    ratio: float
    h_plus: float | None = None
    h_minus: float | None = None
    gamma_plus_max: float | None = None
    gamma_plus_min: float | None = None
    gamma_minus_max: float | None = None
    gamma_minus_min: float | None = None
    w_value: float | None = None
    exists: bool = True
    regime: str | None = None


def period(params: ModelParams,
           coeffs: AsymptoticCoefficients | None = None) -> PeriodReport:
    """Collapse-revival period T_cr = 2 pi / |nu_cr| = |pi (N+1)/Delta - pi/(2g)|.

    Also reports the three regime approximations: pi N / Delta (g N >> Delta),
    pi (2c - 1)/(2g) with c = g N / Delta (c of order one; zero at c = 1/2,
    where only the rapid oscillation survives), and pi/(2g) (g N << Delta).
    """
    n = params.n_bath
    g = params.g
    delta = params.detuning
    exists = g != 0.0 and delta != 0.0
    if not exists:
        return PeriodReport(t_cr=math.inf, exists=False, regime="nonexistent",
                            c_ratio=math.nan, approx_large_gn=math.inf,
                            approx_order_one_c=math.inf, approx_small_gn=math.inf,
                            scale_separation=math.inf)

    nu0 = abs(2.0 * (n + 1.0) * g - delta)
    nu_cr = 4.0 * g * delta / nu0 if nu0 > 0 else math.inf
    t_cr = 2.0 * math.pi / abs(nu_cr) if nu0 > 0 else 0.0

    c = g * n / delta
    if abs(c) >= 10.0:
        regime = "large-gN"
    elif abs(c) <= 0.1:
        regime = "small-gN"
    else:
        regime = "order-one-c"
    separation = nu0 / abs(nu_cr) if nu0 > 0 else 0.0

    return PeriodReport(
        t_cr=t_cr,
        exists=True,
        regime=regime,
        c_ratio=c,
        approx_large_gn=abs(math.pi * n / delta),
        approx_order_one_c=math.pi * (2.0 * c - 1.0) / (2.0 * g),
        approx_small_gn=abs(math.pi / (2.0 * g)),
        scale_separation=separation,
    )


def _gamma_extrema(params: ModelParams, coeffs: AsymptoticCoefficients,
                   pc: PairCoefficients) -> tuple[float, float, float, float]:
    """max/min of the upper (+) and lower (-) envelopes over a period.

    max Gamma_+- = (1/2) sqrt(alpha_z Dz^2 + alpha_x +- 2 a1 alpha_z coth(b/2)/N)
    min Gamma_+- = (1/2) sqrt(alpha_z Dz^2 + alpha_x tanh^2(b/2)
                              +- 2 a1 alpha_z tanh(b/2)/N)
    """
    beta = params.omega_b / params.t_bath
    n = params.n_bath
    dzb = dz_mean(params, coeffs)
    th = math.tanh(beta / 2.0)
    base = pc.alpha_z * dzb ** 2
    zs = 2.0 * coeffs.a1 * pc.alpha_z / n

    def root(x: float) -> float:
        return 0.5 * math.sqrt(max(x, 0.0))

    gp_max = root(base + pc.alpha_x + zs / th)
    gm_max = root(base + pc.alpha_x - zs / th)
    gp_min = root(base + pc.alpha_x * th ** 2 + zs * th)
    gm_min = root(base + pc.alpha_x * th ** 2 - zs * th)
    return gp_max, gp_min, gm_max, gm_min


def fwhm_analytic(params: ModelParams, coeffs: AsymptoticCoefficients,
                  pc: PairCoefficients, k: int = 1,
                  alpha_x_eps: float = 1e-12) -> CollapseRevivalReport:
    """Analytic peak time, FWHM revival time, collapse time, and extrema.

    t_p = 2 k pi / nu_cr (k-th revival; k = 0 is the peak at the origin).
    The half-maximum crossing is solved on the leading-order squared
    envelope, giving a revival/collapse split whose ratio depends only on
    the pair shape alpha_x : alpha_z and on omega_b/T.

    Raises AlphaXDegenerateError for alpha_x <= alpha_x_eps (the crossing
    equation degenerates to 0/0 for a pure z pair; use fwhm_numeric).
    """
    rep = period(params, coeffs)
    if not rep.exists:
        raise NoCollapseRevivalError("no collapse-revival pattern at g = 0 or Delta = 0")
    if pc.alpha_x <= alpha_x_eps:
        raise AlphaXDegenerateError(
            "analytic FWHM is degenerate for a pure z pair; use fwhm_numeric")

    beta = params.omega_b / params.t_bath
    ch = math.cosh(beta)
    q = 0.25 * pc.alpha_z  # leading-order mean (Dz -> 1)
    r = 0.25 * pc.alpha_x * (ch - 1.0)
    g_top = math.sqrt(q + r / (ch - 1.0))  # P_- minimum at the peak
    g_bot = math.sqrt(q + r / (ch + 1.0))
    g_half2 = ((g_top + g_bot) / 2.0) ** 2
    p_half = r / (g_half2 - q)
    arg = ch - p_half
    if not -1.0 <= arg <= 1.0:
        raise ArccosDomainError(f"half-maximum arccos argument {arg} outside [-1, 1]")

    nu_cr = abs(coeffs.nu_cr)
    theta_half = math.acos(arg)
    delta_t = theta_half / nu_cr
    t_r = 2.0 * delta_t
    t_cr = rep.t_cr
    t_c = t_cr - t_r
    # auxiliary w reported so that arg == cosh b - 8 alpha_x sinh^2 b / w
    w_value = 8.0 * pc.alpha_x * math.sinh(beta) ** 2 / p_half

    gp_max, gp_min, gm_max, gm_min = _gamma_extrema(params, coeffs, pc)
    return CollapseRevivalReport(
        t_cr=t_cr,
        t_p=2.0 * k * math.pi / nu_cr,
        delta=delta_t,
        t_r=t_r,
        t_c=t_c,
        ratio=t_c / t_r,
        h_plus=gp_max - gp_min,
        h_minus=gm_max - gm_min,
        gamma_plus_max=gp_max,
        gamma_plus_min=gp_min,
        gamma_minus_max=gm_max,
        gamma_minus_min=gm_min,
        w_value=w_value,
        exists=True,
        regime=rep.regime,
    )


def _interp_crossing(x: np.ndarray, i_lo: int, i_hi: int, level: float) -> float:
    """Linear-interpolated index where x crosses level between two samples."""
    lo, hi = x[i_lo], x[i_hi]
    if hi == lo:
        return float(i_lo)
    return i_lo + (level - lo) / (hi - lo) * (i_hi - i_lo)


def fwhm_numeric(series: DistanceSeries, window: float | None = None,
                 min_points_per_period: int = 200) -> CollapseRevivalReport:
    """Measure period, FWHM revival time, and envelope excursions from data.

    Upper/lower envelopes come from a sliding max/min filter of width
    ``window`` (time units; should cover a few fast oscillation periods but
    stay far below the collapse-revival period).  Peaks of the upper
    envelope give the period; the FWHM of the first interior peak, measured
    at the midlevel between the local envelope max and min with linear
    interpolation at the crossings, gives the revival time.

    Requires a uniform grid spanning at least ~1.5 periods; raises
    NoPeakFoundError for flat or unmodulated series and
    InsufficientSpanError when fewer than two envelope peaks are visible.
    """
    t = np.asarray(series.grid, dtype=float)
    d = np.asarray(series.d_values, dtype=float)
    if len(t) < 16:
        raise InsufficientSpanError("series too short for envelope extraction")
    steps = np.diff(t)
    dt = float(steps[0])
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise InsufficientSpanError("fwhm_numeric requires a uniform time grid")

    if window is None:
        window = 64.0 * dt
    wlen = max(3, int(round(window / dt))) | 1

    env_up = maximum_filter1d(d, wlen)
    env_lo = minimum_filter1d(d, wlen)
    span = float(env_up.max() - env_up.min())
    if span < 1e-9 * max(1.0, float(env_up.max())):
        raise NoPeakFoundError("series envelope is flat; no collapse-revival peak")

    peaks, _ = find_peaks(env_up, prominence=0.25 * span)
    if len(peaks) == 0:
        raise NoPeakFoundError("no interior envelope peak found")
    if len(peaks) >= 2:
        t_cr = float(np.median(np.diff(t[peaks])))
    else:
        # single interior peak: use its distance from the t = 0 revival
        t_cr = float(t[peaks[0]] - t[0])
    if t_cr <= 0 or len(d) < 1.5 * t_cr / dt or t_cr / dt < min_points_per_period:
        raise InsufficientSpanError(
            "series must span >= 1.5 collapse-revival periods with "
            f">= {min_points_per_period} points per period")

    i_peak = int(peaks[0])
    half_rad = int(round(0.5 * t_cr / dt))
    lo_i = max(0, i_peak - half_rad)
    hi_i = min(len(d), i_peak + half_rad + 1)
    seg = env_up[lo_i:hi_i]
    seg_lo = env_lo[lo_i:hi_i]
    hi_val, lo_val = float(seg.max()), float(seg.min())
    level = 0.5 * (hi_val + lo_val)

    j = i_peak - lo_i
    left = j
    while left > 0 and seg[left] >= level:
        left -= 1
    right = j
    while right < len(seg) - 1 and seg[right] >= level:
        right += 1
    if left == 0 or right == len(seg) - 1:
        raise InsufficientSpanError("half-maximum crossings fall outside the series")
    x_l = _interp_crossing(seg, left, left + 1, level)
    x_r = _interp_crossing(seg, right, right - 1, level)
    t_r = (x_r - x_l) * dt
    t_c = t_cr - t_r

    return CollapseRevivalReport(
        t_cr=t_cr,
        t_p=float(t[i_peak]),
        delta=0.5 * t_r,
        t_r=t_r,
        t_c=t_c,
        ratio=t_c / t_r,
        h_plus=hi_val - lo_val,
        h_minus=float(seg_lo.max() - seg_lo.min()),
        gamma_plus_max=hi_val,
        gamma_plus_min=lo_val,
        gamma_minus_max=float(seg_lo.max()),
        gamma_minus_min=float(seg_lo.min()),
        exists=True,
        regime=None,
    )
