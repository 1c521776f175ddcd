"""Exact time-local master-equation rates of the central spin.

The reduced dynamics obeys a time-local generator with a Lamb-shift-like
frequency Omega(t), a dephasing rate Gamma_d(t), and dissipation/absorption
rates Gamma_-+(t), all algebraic in the propagator functions and their time
derivatives:

    Omega   = (X1' X2 - X1 X2') / (2 (X1^2 + X2^2))
            = -(1/2) d/dt arctan(X2/X1),
    Gamma_d = (1/4) d/dt ln(Z1 / (X1^2 + X2^2)),
    Gamma_- = -(1/2) [ Z2' + (Z1'/Z1)(1 - Z2) ],
    Gamma_+ = -(1/2) [-Z2' + (Z1'/Z1)(1 + Z2) ],

so that Gamma_+ + Gamma_- = -d ln Z1 / dt identically.  Transient negative
rates witness the non-Markovianity of the evolution.

Derivatives are exact term-wise differentiations of the block sums (every
propagator is a finite sum of complex exponentials), never finite
differences: the rate formulas contain derivative ratios that amplify
finite-difference noise near the zeros of X2 and Z1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import coherence_terms, exp_sum_uniform, population_terms, propagator_sample
from .model import SubspaceSpectrum, ThermalWeights

__all__ = [
    "RateSample",
    "propagator_derivatives",
    "derivative_grid",
    "rates",
    "rates_grid",
    "bloch_rhs",
]

#: a rate below -EPS_RATE counts as genuinely negative
EPS_RATE = 1e-10
#: propagator magnitudes below this flag the sample as singular
EPS_SINGULAR = 1e-9


@dataclass(frozen=True)
class RateSample:
    """Master-equation coefficients at one time.

    ``singular`` marks proximity to a zero of X1^2+X2^2, Z1, or X2 (the
    paper's logarithm arguments); rates at singular samples are still the
    algebraic values but can be arbitrarily large.
    """

    t: float
    omega: float
    gamma_d: float
    gamma_minus: float
    gamma_plus: float
    any_negative: bool
    singular: bool


def propagator_derivatives(spec: SubspaceSpectrum, weights: ThermalWeights,
                           t: float) -> tuple[float, float, float, float]:
    """Exact (dX1, dX2, dZ1, dZ2) at one time by term-wise differentiation.

    d/dt [cos(F t) + i (G/F) sin(F t)] = -F sin(F t) + i G cos(F t); the
    degenerate F = 0 blocks need no special casing since G = 0 there too.
    """
    w = weights.weights
    f = spec.f_m
    ft = f * t
    c = np.cos(ft)
    s = np.sin(ft)
    em = c + 1j * spec.g_over_f * s
    dem = -f * s + 1j * spec.g_m * c

    prod = w * em[:-1] * em[1:]
    dprod = w * (dem[:-1] * em[1:] + em[:-1] * dem[1:])
    coh = complex(math.fsum(prod.real), math.fsum(prod.imag))
    dcoh = complex(math.fsum(dprod.real), math.fsum(dprod.imag))
    rot = complex(math.cos(spec.omega_b * t), math.sin(spec.omega_b * t))
    dcoh = rot * (dcoh + 1j * spec.omega_b * coh)

    h2f = (1.0 - spec.g_over_f[:-1] ** 2) * f[:-1]
    dswc = math.fsum(w * h2f * np.sin(2.0 * ft[:-1]))
    eb = weights.boltzmann_ratio
    return dcoh.real, dcoh.imag, -(1.0 + eb) * dswc, (eb - 1.0) * dswc


def derivative_grid(spec: SubspaceSpectrum, weights: ThermalWeights, t0: float,
                    dt: float, n: int, threads: int | None = None):
    """(dX1, dX2, dZ1, dZ2) arrays on a uniform grid.

    Same exponential-sum factorization as the propagator grid, with each
    line's coefficient multiplied by i times its frequency.
    """
    fr, co = coherence_terms(spec, weights)
    dcoh = exp_sum_uniform(fr, co * (1j * fr), t0, dt, n, threads=threads)
    fr_z, co_z, _ = population_terms(spec, weights)
    dswc = -exp_sum_uniform(fr_z, co_z * (1j * fr_z), t0, dt, n, threads=threads).real
    eb = weights.boltzmann_ratio
    return (np.ascontiguousarray(dcoh.real), np.ascontiguousarray(dcoh.imag),
            -(1.0 + eb) * dswc, (eb - 1.0) * dswc)


def _rates_from_values(t, x1, x2, z1, z2, dx1, dx2, dz1, dz2,
                       eps_rate: float, eps_singular: float):
    xsq = x1 * x1 + x2 * x2
    omega = (dx1 * x2 - x1 * dx2) / (2.0 * xsq)
    dlnz1 = dz1 / z1
    gamma_d = 0.25 * (dlnz1 - (2.0 * x1 * dx1 + 2.0 * x2 * dx2) / xsq)
    gamma_minus = -0.5 * (dz2 + dlnz1 * (1.0 - z2))
    gamma_plus = -0.5 * (-dz2 + dlnz1 * (1.0 + z2))
    singular = (xsq < eps_singular) | (np.abs(z1) < eps_singular) | (np.abs(x2) < eps_singular)
    any_negative = np.minimum(np.minimum(gamma_d, gamma_minus), gamma_plus) < -eps_rate
    return omega, gamma_d, gamma_minus, gamma_plus, any_negative, singular


def rates(spec: SubspaceSpectrum, weights: ThermalWeights, t: float,
          eps_rate: float = EPS_RATE, eps_singular: float = EPS_SINGULAR) -> RateSample:
    """Master-equation rates at one time, from exact analytic derivatives."""
    p = propagator_sample(spec, weights, t)
    d = propagator_derivatives(spec, weights, t)
    om, gd, gm, gp, neg, sing = _rates_from_values(
        t, p.x1, p.x2, p.z1, p.z2, *d, eps_rate=eps_rate, eps_singular=eps_singular)
    return RateSample(t=float(t), omega=float(om), gamma_d=float(gd),
                      gamma_minus=float(gm), gamma_plus=float(gp),
                      any_negative=bool(neg), singular=bool(sing))


def rates_grid(spec: SubspaceSpectrum, weights: ThermalWeights, t0: float,
               dt: float, n: int, threads: int | None = None,
               eps_rate: float = EPS_RATE, eps_singular: float = EPS_SINGULAR):
    """Vectorized rates on a uniform grid; returns a dict of arrays."""
    from .dynamics import propagator_grid

    grid = propagator_grid(spec, weights, t0, dt, n, threads=threads)
    d = derivative_grid(spec, weights, t0, dt, n, threads=threads)
    om, gd, gm, gp, neg, sing = _rates_from_values(
        grid.times, grid.x1, grid.x2, grid.z1, grid.z2, *d,
        eps_rate=eps_rate, eps_singular=eps_singular)
    return {
        "t": grid.times, "omega": om, "gamma_d": gd, "gamma_minus": gm,
        "gamma_plus": gp, "any_negative": neg, "singular": sing,
    }


def bloch_rhs(sample: RateSample, v) -> np.ndarray:
    """Bloch-vector time derivative generated by the master equation.

    dx/dt = -2 Omega y - (2 Gamma_d + (Gamma_+ + Gamma_-)/2) x
    dy/dt = +2 Omega x - (2 Gamma_d + (Gamma_+ + Gamma_-)/2) y
    dz/dt = -(Gamma_+ + Gamma_-) z + (Gamma_+ - Gamma_-)
    """
    gsum = sample.gamma_plus + sample.gamma_minus
    gt = 2.0 * sample.gamma_d + 0.5 * gsum
    x, y, z = float(v[0]), float(v[1]), float(v[2])
    return np.array([
        -2.0 * sample.omega * y - gt * x,
        2.0 * sample.omega * x - gt * y,
        -gsum * z + (sample.gamma_plus - sample.gamma_minus),
    ])
