"""Exact reduced Bloch dynamics of the central spin, plus a brute-force
full-Hilbert-space oracle for small baths.

The reduced evolution is affine in the initial Bloch vector,

    x(t) = x0 X1(t) + y0 X2(t)
    y(t) = y0 X1(t) - x0 X2(t)
    z(t) = z0 Z1(t) + Z2(t)

with the four propagator functions given by thermally weighted sums over the
invariant blocks.  Writing E_m(t) = cos(F_m t) + i (G_m/F_m) sin(F_m t), the
coherence sector is one complex sum,

    X1 + i X2 = e^{i omega_b t} sum_m w_m E_m(t) E_{m+1}(t),

and the population sector uses C_m(t) = (1 - G_m^2/F_m^2) sin^2(F_m t):

    Z1 = 1 - (1 + e^{omega_b/T}) sum_m w_m C_m,
    Z2 = (e^{omega_b/T} - 1) sum_m w_m C_m.

Every term is a finite sum of complex exponentials, which the uniform-grid
evaluator exploits: on a grid t0 + k dt the phases factor into a fixed
(block x term) matrix times per-block anchor phases, so an n-point
evaluation becomes a few matrix products with no per-point transcendentals.

The oracle builds the total Hamiltonian explicitly from Pauli tensor
products and the bath thermal state as the projector-weighted Dicke mixture,
evolves by dense eigendecomposition, and partial-traces the bath.  Basis
ordering puts the central spin's lower level first (its Bloch z = +1 for the
lower level, matching the convention of the reduced solution); with that
ordering the free terms enter with -sigma_z and the coupling is the plain
isotropic sum g (sx sx + sy sy + sz sz) on every system-bath pair.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionTooLargeError
from .model import ModelParams, SubspaceSpectrum, ThermalWeights

__all__ = [
    "ORACLE_MAX_BATH",
    "BlochVector",
    "PropagatorSample",
    "PropagatorGrid",
    "propagator_sample",
    "propagator_grid",
    "evolve_bloch",
    "full_hilbert_evolve",
    "full_hilbert_propagator",
    "default_threads",
]

ORACLE_MAX_BATH = 12  # 2^(N+1) <= 8192


@dataclass(frozen=True)
class BlochVector:
    """Bloch vector (x, y, z) of the central spin."""

    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @classmethod
    def from_array(cls, v) -> "BlochVector":
        return cls(float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class PropagatorSample:
    """Values of the four propagator functions at one time."""

    t: float
    x1: float
    x2: float
    z1: float
    z2: float


@dataclass(frozen=True)
class PropagatorGrid:
    """Propagator functions on the uniform grid t0 + dt * arange(n).

    Sectors not requested from :func:`propagator_grid` are None.
    """

    t0: float
    dt: float
    n: int
    x1: np.ndarray | None
    x2: np.ndarray | None
    z1: np.ndarray | None
    z2: np.ndarray | None

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def sample(self, k: int) -> PropagatorSample:
        return PropagatorSample(
            t=self.t0 + self.dt * k,
            x1=float(self.x1[k]) if self.x1 is not None else float("nan"),
            x2=float(self.x2[k]) if self.x2 is not None else float("nan"),
            z1=float(self.z1[k]) if self.z1 is not None else float("nan"),
            z2=float(self.z2[k]) if self.z2 is not None else float("nan"),
        )


def propagator_sample(spec: SubspaceSpectrum, weights: ThermalWeights, t: float) -> PropagatorSample:
    """Exact propagator functions at a single time.

    The N+1 block terms are oscillatory and cancel heavily at large N, so
    the reductions use math.fsum (exactly rounded compensated summation).
    """
    w = weights.weights
    ft = spec.f_m * t
    c = np.cos(ft)
    s = np.sin(ft)
    em = c + 1j * spec.g_over_f * s
    prod = w * em[:-1] * em[1:]
    coh = complex(math.fsum(prod.real), math.fsum(prod.imag))
    coh *= complex(math.cos(spec.omega_b * t), math.sin(spec.omega_b * t))

    h2 = 1.0 - spec.g_over_f[:-1] ** 2
    swc = math.fsum(w * h2 * s[:-1] ** 2)
    eb = weights.boltzmann_ratio
    return PropagatorSample(
        t=float(t),
        x1=coh.real,
        x2=coh.imag,
        z1=1.0 - (1.0 + eb) * swc,
        z2=(eb - 1.0) * swc,
    )


def evolve_bloch(sample: PropagatorSample, v0: BlochVector) -> BlochVector:
    """Apply the affine reduced map at one time to an initial Bloch vector."""
    return BlochVector(
        x=v0.x * sample.x1 + v0.y * sample.x2,
        y=v0.y * sample.x1 - v0.x * sample.x2,
        z=v0.z * sample.z1 + sample.z2,
    )


# ---------------------------------------------------------------------------
# uniform-grid evaluation via exponential sums
# ---------------------------------------------------------------------------

def default_threads() -> int:
    """Worker count: SPINSTAR_THREADS env var, else min(cpu_count, 4)."""
    env = os.environ.get("SPINSTAR_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(os.cpu_count() or 1, 4))


def coherence_terms(spec: SubspaceSpectrum, weights: ThermalWeights):
    """Frequencies and real coefficients with X1 + iX2 = sum c_j e^{i nu_j t}.

    E_m = a_m e^{iF_m t} + b_m e^{-iF_m t} with a = (1+G/F)/2, b = (1-G/F)/2,
    so each block contributes four lines at omega_b +- F_m +- F_{m+1}.
    """
    w = weights.weights
    f = spec.f_m
    a = 0.5 * (1.0 + spec.g_over_f)
    b = 0.5 * (1.0 - spec.g_over_f)
    freqs = []
    coefs = []
    for sa, va in ((1.0, a), (-1.0, b)):
        for sb, vb in ((1.0, a), (-1.0, b)):
            freqs.append(spec.omega_b + sa * f[:-1] + sb * f[1:])
            coefs.append(w * va[:-1] * vb[1:])
    return np.concatenate(freqs), np.concatenate(coefs)


def population_terms(spec: SubspaceSpectrum, weights: ThermalWeights):
    """(freqs, coefs, dc) with sum_m w_m C_m(t) = dc - Re sum c_j e^{i nu_j t}."""
    w = weights.weights
    h2 = 1.0 - spec.g_over_f[:-1] ** 2
    coefs = 0.5 * w * h2
    return 2.0 * spec.f_m[:-1], coefs, float(np.sum(coefs))


def exp_sum_uniform(freqs: np.ndarray, coefs: np.ndarray, t0: float, dt: float,
                    n: int, threads: int | None = None, block: int = 2048,
                    group: int = 1024, tile: int = 64) -> np.ndarray:
    """Evaluate sum_j coefs_j exp(i freqs_j t) on t0 + dt*arange(n).

    Phases factor over the uniform grid: with t = t0 + (B*b + k) dt,
    e^{i nu t} = e^{i nu k dt} * e^{i nu (t0 + B b dt)}, so the evaluation is
    P @ A with a fixed phase matrix P (block x terms) and per-block anchor
    columns A.  Work is partitioned into tiles of a fixed number of blocks;
    threads take whole tiles and write disjoint output slices, so every
    intermediate matrix shape (and hence every rounding) is independent of
    the thread count.
    """
    freqs = np.asarray(freqs, dtype=float)
    coefs = np.asarray(coefs, dtype=complex)
    nblocks = (n + block - 1) // block
    out = np.empty(block * nblocks, dtype=complex)
    kdt = np.arange(block) * dt
    starts = t0 + block * dt * np.arange(nblocks)
    nthreads = threads if threads is not None else default_threads()

    groups = [(freqs[k0:k0 + group], coefs[k0:k0 + group])
              for k0 in range(0, len(freqs), group)]
    phase_mats = [np.exp(1j * np.outer(kdt, fg)) for fg, _ in groups]

    def run_tile(ti: int) -> None:
        b_lo = ti * tile
        b_hi = min(nblocks, b_lo + tile)
        v = np.zeros((block, b_hi - b_lo), dtype=complex)
        for (fg, cg), p in zip(groups, phase_mats):
            anchors = np.exp(1j * np.outer(fg, starts[b_lo:b_hi])) * cg[:, None]
            v += p @ anchors
        out[b_lo * block:b_hi * block] = v.T.ravel()

    ntiles = (nblocks + tile - 1) // tile
    if nthreads <= 1 or ntiles <= 1:
        for ti in range(ntiles):
            run_tile(ti)
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(run_tile, range(ntiles)))
    return out[:n]


def propagator_grid(spec: SubspaceSpectrum, weights: ThermalWeights, t0: float,
                    dt: float, n: int, *, need_x: bool = True, need_z: bool = True,
                    threads: int | None = None) -> PropagatorGrid:
    """Propagator functions on a uniform time grid.

    Computes only the requested sectors; the z sector costs one exponential
    sum over N+1 lines, the x sector one over 4(N+1) lines.
    """
    x1 = x2 = z1 = z2 = None
    if need_x:
        fr, co = coherence_terms(spec, weights)
        coh = exp_sum_uniform(fr, co, t0, dt, n, threads=threads)
        x1 = np.ascontiguousarray(coh.real)
        x2 = np.ascontiguousarray(coh.imag)
    if need_z:
        fr, co, dc = population_terms(spec, weights)
        swc = dc - exp_sum_uniform(fr, co, t0, dt, n, threads=threads).real
        eb = weights.boltzmann_ratio
        z1 = 1.0 - (1.0 + eb) * swc
        z2 = (eb - 1.0) * swc
    return PropagatorGrid(t0=t0, dt=dt, n=n, x1=x1, x2=x2, z1=z1, z2=z2)


# ---------------------------------------------------------------------------
# full-Hilbert-space oracle
# ---------------------------------------------------------------------------

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_PAULIS = (_SX, _SY, _SZ)

# above this dimension, skip the cached projenitor matrices and evolve directly
_FAST_ORACLE_DIM = 1024


def _site_op(op: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    out = np.array([[1.0 + 0.0j]])
    for k in range(n_sites):
        out = np.kron(out, op if k == site else np.eye(2, dtype=complex))
    return out


def _dicke_vector(n: int, k_excited: int) -> np.ndarray:
    """Normalized symmetric state of n bath spins with k excited."""
    vec = np.zeros(2 ** n)
    for idx in range(2 ** n):
        if idx.bit_count() == k_excited:
            vec[idx] = 1.0
    return vec / math.sqrt(math.comb(n, k_excited))


class _FullModel:
    """Cached eigendecomposition and partial-trace contractions for one params."""

    def __init__(self, params: ModelParams):
        if params.n_bath > ORACLE_MAX_BATH:
            raise DimensionTooLargeError(
                f"full-Hilbert oracle limited to n_bath <= {ORACLE_MAX_BATH}, "
                f"got {params.n_bath}")
        n = params.n_bath
        sites = n + 1  # central spin is site 0
        h = np.zeros((2 ** sites, 2 ** sites), dtype=complex)
        h -= params.omega_s / 2.0 * _site_op(_SZ, 0, sites)
        for k in range(1, sites):
            h -= params.omega_b / 2.0 * _site_op(_SZ, k, sites)
            for pauli in _PAULIS:
                h += params.g * _site_op(pauli, 0, sites) @ _site_op(pauli, k, sites)

        self.dim = 2 ** sites
        self.bath_dim = 2 ** n
        self.evals, self.vecs = np.linalg.eigh(h)

        rho_b = np.zeros((self.bath_dim, self.bath_dim))
        beta = params.omega_b / params.t_bath
        ex = -(np.arange(n + 1) - n / 2.0) * beta
        ex -= ex.max()
        w = np.exp(ex)
        w /= w.sum()
        for k_exc, wk in enumerate(w):
            v = _dicke_vector(n, k_exc)
            rho_b += wk * np.outer(v, v)
        self.rho_b = rho_b

        self._contractions = None
        if self.dim <= _FAST_ORACLE_DIM:
            vb = [self.vecs[a * self.bath_dim:(a + 1) * self.bath_dim, :] for a in range(2)]
            self._contractions = {}
            for a in range(2):
                for b in range(2):
                    gab = vb[a].conj().T @ vb[b]
                    for c in range(2):
                        for d in range(2):
                            rcd = vb[c].conj().T @ rho_b @ vb[d]
                            self._contractions[(a, b, c, d)] = rcd * gab.conj()
        self._maps: dict[float, np.ndarray] = {}

    def process_matrix(self, t: float) -> np.ndarray:
        """K with rho_s(t)[a,b] = sum_cd K[a,b,c,d] rho_s(0)[c,d]."""
        cached = self._maps.get(t)
        if cached is not None:
            return cached
        u = np.exp(-1j * self.evals * t)
        k = np.empty((2, 2, 2, 2), dtype=complex)
        for (a, b, c, d), mat in self._contractions.items():
            k[a, b, c, d] = u @ mat @ u.conj()
        if len(self._maps) < 64:
            self._maps[t] = k
        return k

    def reduced_state(self, rho_s0: np.ndarray, t: float) -> np.ndarray:
        if self._contractions is not None:
            k = self.process_matrix(t)
            return np.einsum("abcd,cd->ab", k, rho_s0)
        # large-dimension fallback: direct evolve and partial trace
        rho = np.kron(rho_s0, self.rho_b)
        rt = self.vecs.conj().T @ rho @ self.vecs
        u = np.exp(-1j * self.evals * t)
        rt = (u[:, None] * rt) * u.conj()[None, :]
        rho_t = self.vecs @ rt @ self.vecs.conj().T
        return np.einsum("aibi->ab", rho_t.reshape(2, self.bath_dim, 2, self.bath_dim))


@lru_cache(maxsize=4)
def _full_model(params: ModelParams) -> _FullModel:
    return _FullModel(params)


def full_hilbert_evolve(params: ModelParams, v0: BlochVector, t: float) -> BlochVector:
    """Brute-force reduced Bloch vector from the 2^(N+1)-dimensional model.

    Verification oracle, independent of the Dicke-basis solution: explicit
    tensor-product Hamiltonian, dense eigendecomposition, partial trace.
    Requires n_bath <= ORACLE_MAX_BATH.
    """
    model = _full_model(params)
    rho_s0 = 0.5 * (np.eye(2, dtype=complex) + v0.x * _SX + v0.y * _SY + v0.z * _SZ)
    rho_t = model.reduced_state(rho_s0, t)
    return BlochVector(
        x=float(np.trace(rho_t @ _SX).real),
        y=float(np.trace(rho_t @ _SY).real),
        z=float(np.trace(rho_t @ _SZ).real),
    )


def full_hilbert_propagator(params: ModelParams, t: float) -> PropagatorSample:
    """Propagator functions implied by the oracle via basis initial states.

    v0 = (1,0,0) gives (x, y) = (X1, -X2); v0 = (0,0,+-1) gives z = +-Z1 + Z2.
    """
    vx = full_hilbert_evolve(params, BlochVector(1.0, 0.0, 0.0), t)
    vzp = full_hilbert_evolve(params, BlochVector(0.0, 0.0, 1.0), t)
    vzm = full_hilbert_evolve(params, BlochVector(0.0, 0.0, -1.0), t)
    return PropagatorSample(
        t=float(t),
        x1=vx.x,
        x2=-vx.y,
        z1=0.5 * (vzp.z - vzm.z),
        z2=0.5 * (vzp.z + vzm.z),
    )
