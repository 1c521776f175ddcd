"""Model parameters, invariant-subspace spectra, and thermal bath weights.

A central spin is coupled with equal strength g to every spin of an N-spin
bath (spin-star geometry), with system frequency omega_s, bath frequency
omega_b, and the bath prepared in a thermal state over the symmetric (Dicke)
sector at temperature T (k_B = hbar = 1).

The joint Hamiltonian block-diagonalizes over two-dimensional invariant
subspaces labeled by the Dicke projection m, plus two one-dimensional edge
subspaces. This module computes the per-block spectral data (eigenvalues,
mixing coefficients) and the thermal weights of the Dicke ladder; every
other module consumes these arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelParams",
    "SubspaceSpectrum",
    "ThermalWeights",
    "compute_spectrum",
    "thermal_weights",
]


def _sgn(x: float) -> float:
    # sgn(0) := +1 keeps the eigenvector formulas total; at g = 0 the
    # dynamics is coupling-free so the choice is unobservable.
    return 1.0 if x >= 0 else -1.0


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the spin-star model.

    Attributes:
        n_bath: number of bath spins N (>= 1).
        g: system-bath coupling strength; any real, including 0 and negative.
        omega_s: central-spin frequency.
        omega_b: bath-spin frequency (nonzero).
        t_bath: bath temperature (> 0, k_B = 1).
    """

    n_bath: int
    g: float
    omega_s: float
    omega_b: float
    t_bath: float

    def __post_init__(self):
        if self.n_bath < 1:
            raise ValueError(f"n_bath must be >= 1, got {self.n_bath}")
        if self.t_bath <= 0:
            raise ValueError(f"t_bath must be positive, got {self.t_bath}")
        if self.omega_b == 0:
            raise ValueError("omega_b must be nonzero")

    @property
    def detuning(self) -> float:
        """Frequency detuning between central spin and bath spins."""
        return self.omega_s - self.omega_b

    @property
    def j_total(self) -> float:
        """Collective bath spin J = N/2 (half-integer for odd N)."""
        return self.n_bath / 2


@dataclass(frozen=True)
class SubspaceSpectrum:
    """Eigensystem of the 2x2 invariant blocks, one entry per Dicke label m.

    Arrays run over m = -J, -J+1, ..., J, J+1 (``n_bath + 2`` entries).
    ``two_m`` holds 2m as exact integers so half-integer labels (odd N) carry
    no floating-point drift. The block with label m couples the basis pair
    (system-ground, bath m) and (system-excited, bath m-1); at the two edge
    labels eta_m = 0 and the block is diagonal.

    ``g_over_f`` is G_m/F_m with the degenerate block F_m = 0 resolved to 0,
    which reproduces the G -> 0 limit of the mixing coefficients.
    """

    omega_b: float
    two_m: np.ndarray
    e_m: np.ndarray
    g_m: np.ndarray
    eta_m: np.ndarray
    f_m: np.ndarray
    g_over_f: np.ndarray
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    c_plus: np.ndarray
    c_minus: np.ndarray
    d_plus: np.ndarray
    d_minus: np.ndarray

    @property
    def m_values(self) -> np.ndarray:
        return self.two_m / 2.0


@dataclass(frozen=True)
class ThermalWeights:
    """Normalized thermal occupations of the Dicke ladder m = -J..J.

    ``weights[k]`` is the population of the level with 2m = two_m[k]
    (ascending in m); adjacent weights satisfy w[m]/w[m+1] = exp(omega_b/T).

    ``q_value`` is the partition function in the paper normalization
    (may overflow to inf for very large N*omega_b/T; ``log_q`` is always
    finite). ``q_shifted`` = q_value * exp(-J omega_b / T) is the
    overflow-safe shifted form actually used to normalize the weights.
    ``boltzmann_ratio`` = exp(omega_b / T) = w[m] / w[m+1].
    """

    two_m: np.ndarray
    weights: np.ndarray
    q_value: float
    q_shifted: float
    log_q: float
    boltzmann_ratio: float


def _freeze(*arrays: np.ndarray) -> tuple[np.ndarray, ...]:
    for a in arrays:
        a.setflags(write=False)
    return arrays


def compute_spectrum(params: ModelParams) -> SubspaceSpectrum:
    """Eigenvalues and mixing coefficients of every invariant block.

    For each m the block eigenvalues are lambda_{m,+-} = E_m +- F_m with

        E_m   = -g + (2m - 1) omega_b / 2,
        G_m   = (2m - 1) g + Delta / 2,
        eta_m = sqrt((J - m + 1)(J + m)),
        F_m   = sqrt(G_m^2 + 4 eta_m^2 g^2),

    and eigenvector coefficients

        c_{m,+-} = +-sgn(g) sqrt((1 -+ G_m/F_m) / 2),
        d_{m,+-} =          sqrt((1 +- G_m/F_m) / 2).
    """
    n = params.n_bath
    g = params.g
    delta = params.detuning
    j2 = n  # 2J

    two_m = np.arange(-j2, j2 + 3, 2, dtype=np.int64)  # 2m for m = -J..J+1
    m = two_m / 2.0
    j = params.j_total

    eta = np.sqrt(np.maximum((j - m + 1.0) * (j + m), 0.0))
    e_m = -g + (2.0 * m - 1.0) * params.omega_b / 2.0
    g_m = (2.0 * m - 1.0) * g + delta / 2.0
    f_m = np.hypot(g_m, 2.0 * eta * g)
    g_over_f = np.divide(g_m, f_m, out=np.zeros_like(g_m), where=f_m > 0)

    sg = _sgn(g)
    d_plus = np.sqrt(0.5 * np.clip(1.0 + g_over_f, 0.0, 2.0))
    d_minus = np.sqrt(0.5 * np.clip(1.0 - g_over_f, 0.0, 2.0))
    c_plus = sg * d_minus
    c_minus = -sg * d_plus

    lam_p = e_m + f_m
    lam_m = e_m - f_m

    arrays = _freeze(two_m, e_m, g_m, eta, f_m, g_over_f, lam_p, lam_m,
                     c_plus, c_minus, d_plus, d_minus)
    return SubspaceSpectrum(params.omega_b, *arrays)


def thermal_weights(params: ModelParams) -> ThermalWeights:
    """Thermal Dicke-sector weights w_m = exp(-m omega_b / T) / Q.

    Computed in shifted form exp(-(m + J) omega_b / T) normalized by the
    shifted geometric sum, so nothing overflows however large N omega_b / T
    gets. The closed-form partition function is

        Q = [exp((J+1) omega_b/T) - exp(-J omega_b/T)] / [exp(omega_b/T) - 1],

    reported both as ``q_value`` (paper normalization) and ``q_shifted``
    (= Q exp(-J omega_b/T), always finite).
    """
    n = params.n_bath
    beta = params.omega_b / params.t_bath
    two_m = np.arange(-n, n + 1, 2, dtype=np.int64)  # 2m for m = -J..J

    # exponents shifted so the largest is 0; never overflows for either
    # sign of omega_b (the unshifted e^{J omega_b/T} blows up near N ~ 7000 T/omega_b)
    ex = -(two_m / 2.0) * beta
    ex -= ex.max()
    w = np.exp(ex)
    w = w / w.sum()

    # closed-form shifted sum sum_{k=0..N} e^{-k beta} = Q e^{-J beta}
    q_shifted = float(np.expm1(-(n + 1) * beta) / np.expm1(-beta))
    if beta > 0:
        log_q = params.j_total * beta + math.log1p(-math.exp(-(n + 1) * beta)) \
            - math.log1p(-math.exp(-beta))
    else:
        log_q = -(params.j_total + 1) * beta + math.log1p(-math.exp((n + 1) * beta)) \
            - math.log1p(-math.exp(beta))
    try:
        q_value = math.exp(log_q)
    except OverflowError:
        q_value = float("inf")

    two_m, w = _freeze(two_m, w)
    return ThermalWeights(two_m=two_m, weights=w, q_value=q_value,
                          q_shifted=q_shifted, log_q=log_q,
                          boltzmann_ratio=math.exp(beta))
