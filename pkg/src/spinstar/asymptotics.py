"""Large-bath closed forms: oscillation envelopes, means, phases, and the
ladder-sum identities they rest on.

For N >> T/omega_b the thermally weighted block sums reduce to geometric
sums over the rescaled ladder xi = (m + J)/N in [0, 1].  With
z(theta) = exp(-omega_b/T + i theta) the three sums that enter at the
retained orders are

    T_0 = 1/(1 - z),   T_1 = z/(N (1-z)^2),   T_2 = z (1+z)/(N^2 (1-z)^3),

and every mean / amplitude / phase below is an algebraic combination of
these evaluated at the slow angle theta = nu_cr t.  The fast frequency is
nu_0 = |2(N+1)g - Delta| (of order N) and the collapse-revival frequency is
nu_cr = 4 g Delta / nu_0 (of order 1/N); their interplay produces the
periodic collapse and revival of the oscillation amplitude.

Amplitudes and phases are carried as complex numbers, so every arctangent
is the quadrant-correct two-argument form arg(num + i den) by construction,
and the magnitude-phase expressions quoted in the docstrings are recovered
as |.| and arg(.) of the same quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ResonanceError, ValidityRegionError
from .model import ModelParams

__all__ = [
    "AsymptoticCoefficients",
    "EnvelopeSample",
    "coefficients",
    "validity_interval",
    "p_functions",
    "xi_sum_direct",
    "xi_sum_closed",
    "xi_phases",
    "envelope_z",
    "envelope_x",
    "envelope_general",
    "coherence_table",
    "coherence_reconstruct",
]


class _Hyper(NamedTuple):
    beta: float
    cosh: float
    sinh: float
    coth_half: float
    tanh_half: float
    exp_minus: float


def _hyper(params: ModelParams) -> _Hyper:
    # all hyperbolics from one exponential, for consistency and speed
    beta = params.omega_b / params.t_bath
    eb = math.exp(beta)
    emb = 1.0 / eb
    cosh = 0.5 * (eb + emb)
    sinh = 0.5 * (eb - emb)
    coth_half = sinh / (cosh - 1.0)
    return _Hyper(beta=beta, cosh=cosh, sinh=sinh, coth_half=coth_half,
                  tanh_half=1.0 / coth_half, exp_minus=emb)


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Expansion coefficients and frequencies of the large-N closed forms.

    table1 holds the coherence-series rows (nu_h0, nu_h1, mu_h0, mu_h1, mu_h2)
    for h = 1..4 of the branch selected by branch_sign = sgn(2 g N - Delta);
    the opposite branch reconstructs the complex-conjugate coherence.

    a3 is +inf exactly at the a3 resonance 2 g N = Delta, where the x-pair
    closed forms are invalid (the z-pair forms remain usable).
    """

    a1: float
    a2: float
    a3: float
    nu0: float
    nu1: float
    nu_cr: float
    validity_ok: bool
    branch_sign: int
    table1: tuple[tuple[float, float, float, float, float], ...]


@dataclass(frozen=True)
class EnvelopeSample:
    """Mean, oscillation amplitude, phase, and envelope values.

    Semantics per pair: for the z pair, mean/amplitude/envelopes are values
    of D_z itself; for the x pair and the general pair, mean and amplitude
    are values of the squared distance while upper/lower are envelopes of
    the distance.  The general pair also carries the simplified lowest-order
    envelope for comparison.
    """

    t: np.ndarray
    mean: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    simplified_upper: np.ndarray | None = None
    simplified_lower: np.ndarray | None = None


def validity_interval(params: ModelParams) -> tuple[float, float]:
    """Coupling interval inside which the ladder Taylor expansion diverges."""
    n = params.n_bath
    delta = params.detuning
    root = 2.0 * abs(delta) * math.sqrt(n * (2.0 * n + 1.0))
    denom = 2.0 * (n + 1.0) ** 2
    lo = ((3.0 * n + 1.0) * delta - root) / denom
    hi = ((3.0 * n + 1.0) * delta + root) / denom
    return lo, hi


def coefficients(params: ModelParams) -> AsymptoticCoefficients:
    """Closed-form coefficients a1, a2, a3 and frequencies nu_0, nu_1, nu_cr.

    Raises ResonanceError when 2 (N+1) g = Delta exactly (nu_0 = 0, no fast
    scale).  The other resonance 2 g N = Delta only invalidates a3 and is
    deferred to the x-pair envelope.
    """
    n = params.n_bath
    g = params.g
    delta = params.detuning
    raw = 2.0 * (n + 1.0) * g - delta
    if raw == 0.0:
        raise ResonanceError("2(N+1)g equals the detuning; nu_0 vanishes")
    nu0 = abs(raw)
    nu1 = 4.0 * n * g * delta / nu0
    nu_cr = 4.0 * g * delta / nu0
    a1 = 8.0 * g * g * n * (n + 1.0) / nu0 ** 2
    a2 = -8.0 * g * g * n * n * (2.0 * (n + 1.0) * g + delta) ** 2 / nu0 ** 4
    gap = 2.0 * g * n - delta
    a3 = math.inf if gap == 0.0 else 4.0 * g * g * n * n / gap ** 2
    branch = 1 if gap >= 0 else -1

    lo, hi = validity_interval(params)
    ok = g < lo or g > hi

    return AsymptoticCoefficients(
        a1=a1, a2=a2, a3=a3, nu0=nu0, nu1=nu1, nu_cr=nu_cr,
        validity_ok=ok, branch_sign=branch,
        table1=coherence_table(n, nu0, nu1, a3, branch),
    )


def coherence_table(n: int, nu0: float, nu1: float, a3: float,
                    branch: int) -> tuple[tuple[float, float, float, float, float], ...]:
    """Rows (nu_h0, nu_h1, mu_h0, mu_h1, mu_h2) of the coherence series.

    The two branches (by the sign of 2 g N - Delta) swap which slow row
    carries the a3/N offset and which fast row carries the leading weight,
    making the reconstructed coherences complex conjugates of each other.
    """
    half = nu1 / (2.0 * n)
    lead = (1.0 - a3 / n, -2.0 * a3, a3)
    tail = (0.0, 0.0, a3)
    slow_bare = (0.0, a3, -a3)
    slow_off = (a3 / n, a3, -a3)
    if branch >= 0:
        return (
            (half, 0.0) + slow_bare,
            (-half, 0.0) + slow_off,
            (nu0, nu1) + lead,
            (-nu0, -nu1) + tail,
        )
    return (
        (half, 0.0) + slow_off,
        (-half, 0.0) + slow_bare,
        (nu0, nu1) + tail,
        (-nu0, -nu1) + lead,
    )


def p_functions(params: ModelParams, x) -> tuple[np.ndarray, np.ndarray]:
    """P_+-(x) = cosh(omega_b/T) +- cos(x); their product is the paper's P(x)."""
    hyp = _hyper(params)
    cx = np.cos(np.asarray(x, dtype=float))
    return hyp.cosh + cx, hyp.cosh - cx


def _geom(j: int, theta, n: int, beta: float):
    """Ladder sums T_j(theta) = sum_k (k/N)^j e^{-k beta} e^{i k theta}.

    Closed geometric forms; the truncation tail is O(e^{-N beta}), negligible
    in the expansion's validity regime N >> T/omega_b.
    """
    z = np.exp(-beta + 1j * np.asarray(theta, dtype=float))
    if j == 0:
        return 1.0 / (1.0 - z)
    if j == 1:
        return z / (n * (1.0 - z) ** 2)
    if j == 2:
        return z * (1.0 + z) / (n * n * (1.0 - z) ** 3)
    raise ValueError(f"ladder sums implemented for j in 0..2, got {j}")


def xi_sum_direct(params: ModelParams, coeffs: AsymptoticCoefficients,
                  j: int, t: float) -> float:
    """Brute-force ladder sum over xi = 0, 1/N, ..., 1 (the identity oracle)."""
    n = params.n_bath
    beta = params.omega_b / params.t_bath
    xi = np.arange(n + 1) / n
    return float(np.sum(np.exp(-xi * n * beta) * xi ** j
                        * (1.0 - np.cos(coeffs.nu0 * t + coeffs.nu1 * xi * t))))


def xi_sum_closed(params: ModelParams, coeffs: AsymptoticCoefficients,
                  j: int, t: float) -> float:
    """Closed form of the same ladder sum: DC part minus Re[e^{i nu_0 t} T_j].

    Equals the quoted sech/csch magnitude-phase expressions; e.g. for j = 1
    the oscillating part is cos(nu_0 t - phi_1) / (2 N P_-) and the DC part
    is csch^2(beta/2) / (4 N).
    """
    n = params.n_bath
    beta = params.omega_b / params.t_bath
    theta = coeffs.nu1 * t / n
    dc = _geom(j, 0.0, n, beta).real
    osc = (np.exp(1j * coeffs.nu0 * t) * _geom(j, theta, n, beta)).real
    return float(dc - osc)


def _phase_minus_conv(amp) -> np.ndarray:
    """phi for contributions written as -|amp| cos(nu_0 t - phi), given the
    complex form contribution = Re[e^{i nu_0 t} amp]."""
    return -np.angle(-np.asarray(amp))


def _phase_plus_conv(amp) -> np.ndarray:
    """phi for contributions written as +|amp| cos(nu_0 t - phi)."""
    return -np.angle(np.asarray(amp))


def xi_phases(params: ModelParams, coeffs: AsymptoticCoefficients, t):
    """Quadrant-correct phases (phi_0, phi_1, phi_2) of the ladder sums.

    Equal (mod 2 pi) to the quoted single-argument arctangent expressions
    wherever those land in the right quadrant; computed from the complex
    ladder sums so they are correct everywhere.
    """
    n = params.n_bath
    beta = params.omega_b / params.t_bath
    theta = coeffs.nu1 * np.asarray(t, dtype=float) / n
    return tuple(-np.angle(-_geom(j, theta, n, beta)) for j in range(3))


def _require_valid(coeffs: AsymptoticCoefficients) -> None:
    if not coeffs.validity_ok:
        raise ValidityRegionError(
            "coupling lies inside the divergence interval of the ladder expansion")


def dz_mean(params: ModelParams, coeffs: AsymptoticCoefficients) -> float:
    """Time-independent mean of D_z: 1 - (a1/N) coth(b/2) - (a2/N^2) coth^2(b/2)."""
    hyp = _hyper(params)
    n = params.n_bath
    return 1.0 - coeffs.a1 / n * hyp.coth_half - coeffs.a2 / n ** 2 * hyp.coth_half ** 2


def _z_amp(params: ModelParams, coeffs: AsymptoticCoefficients, theta):
    """Complex amplitude Zc with Z1(t) = mean + Re[e^{i nu_0 t} Zc(theta)].

    |Zc| is the quoted W_z(t) (the sinh(b)/P_- form with the cos(phi_1-phi_2)
    cross term); arg gives phi_3.
    """
    n = params.n_bath
    hyp = _hyper(params)
    return 2.0 * hyp.sinh * (coeffs.a1 * _geom(1, theta, n, hyp.beta)
                             + coeffs.a2 * _geom(2, theta, n, hyp.beta))


def envelope_z(params: ModelParams, coeffs: AsymptoticCoefficients, t,
               *, check_validity: bool = True) -> EnvelopeSample:
    """Mean, amplitude, phase phi_3, and envelopes of D_z(t).

    D_z(t) ~= mean - W_z(t) cos(nu_0 t - phi_3), envelopes mean +- W_z(t).
    The amplitude peaks at nu_cr t = 2 pi k where mean + W_z = 1 exactly.
    """
    if check_validity:
        _require_valid(coeffs)
    t = np.asarray(t, dtype=float)
    theta = coeffs.nu_cr * t
    zc = _z_amp(params, coeffs, theta)
    amp = np.abs(zc)
    mean = np.full(t.shape, dz_mean(params, coeffs))
    return EnvelopeSample(t=t, mean=mean, amplitude=amp,
                          phase=_phase_minus_conv(zc),
                          upper=mean + amp, lower=mean - amp)


def _require_a3(coeffs: AsymptoticCoefficients) -> None:
    if not math.isfinite(coeffs.a3):
        raise ResonanceError("2 g N equals the detuning; a3 diverges and the "
                             "x-pair expansion is invalid")


def dx2_mean(params: ModelParams, coeffs: AsymptoticCoefficients, theta):
    """Slow mean of the squared x-pair distance (three-term closed form)."""
    _require_a3(coeffs)
    n = params.n_bath
    hyp = _hyper(params)
    a3 = coeffs.a3
    ct = np.cos(np.asarray(theta, dtype=float))
    pm = hyp.cosh - ct
    pp = hyp.cosh + ct
    chm1 = hyp.cosh - 1.0
    return (chm1 * (1.0 - a3 / n) ** 2 / pm
            + a3 ** 2 * pp / (n ** 2 * chm1)
            + 2.0 * a3 * chm1 * (hyp.exp_minus - (1.0 - a3 / n) * ct) / (n * pm ** 2))


def dx2_oscillation(params: ModelParams, coeffs: AsymptoticCoefficients, theta):
    """Oscillation amplitude of the squared x-pair distance, (2 a3/N) sqrt(P+/P-)."""
    _require_a3(coeffs)
    n = params.n_bath
    hyp = _hyper(params)
    ct = np.cos(np.asarray(theta, dtype=float))
    return 2.0 * coeffs.a3 / n * np.sqrt((hyp.cosh + ct) / (hyp.cosh - ct))


def _coherence_parts(params: ModelParams, coeffs: AsymptoticCoefficients, t,
                     branch: int | None = None):
    """Slow and fast components of the reconstructed coherence.

    Returns (slow, fast_minus, fast_plus) with

        rho01(t)/(zeta0 zeta1^*) ~= pref e^{-i omega_b t}
            [slow + e^{-i nu_0 t} fast_minus + e^{+i nu_0 t} fast_plus],

    pref = 1 - e^{-beta}.  slow carries the e^{-+ i nu_1 t / 2N} pair of
    near-DC rows; the fast parts carry the ladder sums at -+theta.
    """
    n = params.n_bath
    hyp = _hyper(params)
    rows = coeffs.table1 if branch is None or branch == coeffs.branch_sign \
        else coherence_table(n, coeffs.nu0, coeffs.nu1, coeffs.a3, branch)
    t = np.asarray(t, dtype=float)
    slow = np.zeros(t.shape, dtype=complex)
    fast_minus = np.zeros(t.shape, dtype=complex)
    fast_plus = np.zeros(t.shape, dtype=complex)
    for nu_h0, nu_h1, mu0, mu1, mu2 in rows:
        theta_h = nu_h1 * t / n
        s = (mu0 * _geom(0, -theta_h, n, hyp.beta)
             + mu1 * _geom(1, -theta_h, n, hyp.beta)
             + mu2 * _geom(2, -theta_h, n, hyp.beta))
        if nu_h0 == coeffs.nu0:
            fast_minus = s
        elif nu_h0 == -coeffs.nu0:
            fast_plus = s
        else:
            slow = slow + np.exp(-1j * nu_h0 * t) * s
    return slow, fast_minus, fast_plus


def coherence_reconstruct(params: ModelParams, coeffs: AsymptoticCoefficients,
                          t, branch: int | None = None):
    """Reconstructed normalized coherence rho01/(zeta0 zeta1^*), complex.

    The two table branches give complex conjugates up to the global
    e^{-i omega_b t} rotation, so |.|^2 (the squared x-pair distance) is
    branch-independent.
    """
    _require_a3(coeffs)
    hyp = _hyper(params)
    t = np.asarray(t, dtype=float)
    slow, f_minus, f_plus = _coherence_parts(params, coeffs, t, branch)
    pref = 1.0 - hyp.exp_minus
    return pref * np.exp(-1j * params.omega_b * t) * (
        slow + np.exp(-1j * coeffs.nu0 * t) * f_minus
        + np.exp(1j * coeffs.nu0 * t) * f_plus)


def _x_fast_amp(params: ModelParams, coeffs: AsymptoticCoefficients, t):
    """Complex Xc with D_x^2(t) ~= slow part + Re[e^{i nu_0 t} Xc(t)]."""
    hyp = _hyper(params)
    slow, f_minus, f_plus = _coherence_parts(params, coeffs, t)
    pref2 = (1.0 - hyp.exp_minus) ** 2
    # |slow + e^-i f- + e^+i f+|^2: the e^{+i nu_0 t} cross terms
    return 2.0 * pref2 * (slow * np.conj(f_minus) + f_plus * np.conj(slow))


def envelope_x(params: ModelParams, coeffs: AsymptoticCoefficients, t,
               *, check_validity: bool = True) -> EnvelopeSample:
    """Mean, amplitude, phase phi_4, and envelopes of D_x(t).

    mean and amplitude describe the squared distance,
    D_x^2(t) ~= mean(t) + amplitude(t) cos(nu_0 t - phi_4); the envelopes are
    sqrt(mean +- amplitude).  In contrast to the z pair the mean itself
    carries the collapse-revival modulation.
    """
    if check_validity:
        _require_valid(coeffs)
    _require_a3(coeffs)
    t = np.asarray(t, dtype=float)
    theta = coeffs.nu_cr * t
    mean = dx2_mean(params, coeffs, theta)
    amp = dx2_oscillation(params, coeffs, theta)
    xc = _x_fast_amp(params, coeffs, t)
    return EnvelopeSample(
        t=t, mean=mean, amplitude=amp, phase=_phase_plus_conv(xc),
        upper=np.sqrt(np.maximum(mean + amp, 0.0)),
        lower=np.sqrt(np.maximum(mean - amp, 0.0)),
    )


def envelope_general(params: ModelParams, coeffs: AsymptoticCoefficients,
                     pc, t, *, check_validity: bool = True) -> EnvelopeSample:
    """Envelopes of the distance between two arbitrarily prepared states.

    mean and amplitude describe the squared distance

        D^2(t) ~= mean(t) + amplitude(t) cos(nu_0 t - phi_5),
        mean(t) = (alpha_z/4) Dz_mean^2 + (alpha_x/4) Dx2_mean(t),

    with the amplitude combining the z and x fast components coherently.
    Envelopes are sqrt(mean +- amplitude).  simplified_upper/lower hold the
    lowest-order form Q + (R +- S)/P_-(nu_cr t) under the square root, whose
    P_-^{-1} coefficient sign decides whether the lower envelope peaks
    upward or downward.
    """
    if check_validity:
        _require_valid(coeffs)
    t = np.asarray(t, dtype=float)
    theta = coeffs.nu_cr * t
    hyp = _hyper(params)
    n = params.n_bath
    dzb = dz_mean(params, coeffs)

    use_x = pc.alpha_x > 0
    if use_x:
        _require_a3(coeffs)
        mean = 0.25 * pc.alpha_z * dzb ** 2 + 0.25 * pc.alpha_x * dx2_mean(params, coeffs, theta)
        fast = 0.25 * pc.alpha_x * _x_fast_amp(params, coeffs, t) \
            + 0.5 * pc.alpha_z * dzb * _z_amp(params, coeffs, theta)
    else:
        mean = np.full(t.shape, 0.25 * pc.alpha_z * dzb ** 2)
        fast = 0.5 * pc.alpha_z * dzb * _z_amp(params, coeffs, theta)
    amp = np.abs(fast)

    pm = hyp.cosh - np.cos(theta)
    q = 0.25 * pc.alpha_z * dzb ** 2
    r = 0.25 * pc.alpha_x * (hyp.cosh - 1.0)
    s = 0.5 * pc.alpha_z * coeffs.a1 * hyp.sinh / n
    simp_up = np.sqrt(np.maximum(q + (r + s) / pm, 0.0))
    simp_lo = np.sqrt(np.maximum(q + (r - s) / pm, 0.0))

    return EnvelopeSample(
        t=t, mean=mean, amplitude=amp, phase=_phase_plus_conv(fast),
        upper=np.sqrt(np.maximum(mean + amp, 0.0)),
        lower=np.sqrt(np.maximum(mean - amp, 0.0)),
        simplified_upper=simp_up, simplified_lower=simp_lo,
    )
