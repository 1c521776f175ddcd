import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinstar import ModelParams, compute_spectrum, thermal_weights


def params(n=2, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0):
    return ModelParams(n_bath=n, g=g, omega_s=omega_s, omega_b=omega_b, t_bath=t_bath)


def block_index(spec, m):
    return int(np.where(spec.two_m == round(2 * m))[0][0])


class TestModelParams:
    def test_detuning_and_j(self):
        p = params()
        assert p.detuning == 2.0
        assert p.j_total == 1.0
        assert ModelParams(3, 1.0, 3.0, 1.0, 1.0).j_total == 1.5

    @pytest.mark.parametrize("kwargs", [
        dict(n_bath=0), dict(t_bath=0.0), dict(t_bath=-1.0), dict(omega_b=0.0),
    ])
    def test_rejects_invalid(self, kwargs):
        base = dict(n_bath=2, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ModelParams(**base)

    def test_zero_and_negative_coupling_allowed(self):
        ModelParams(2, 0.0, 3.0, 1.0, 10.0)
        ModelParams(2, -1.5, 3.0, 1.0, 10.0)


class TestSpectrum:
    def test_hand_evaluated_block(self):
        # N=2, g=1, omega_s=3, omega_b=1, m=1: G=2, eta=sqrt(2), F=sqrt(12)
        spec = compute_spectrum(params())
        i = block_index(spec, 1)
        assert spec.g_m[i] == pytest.approx(2.0, abs=1e-14)
        assert spec.eta_m[i] == pytest.approx(math.sqrt(2), abs=1e-14)
        assert spec.f_m[i] == pytest.approx(math.sqrt(12), abs=1e-12)
        assert spec.lambda_plus[i] == pytest.approx(-0.5 + math.sqrt(12), abs=1e-12)
        assert spec.lambda_minus[i] == pytest.approx(-0.5 - math.sqrt(12), abs=1e-12)

    def test_edge_eigenvalues(self):
        # m = J+1 edge: eta = 0 and lambda_+ = (2g + omega_b) J + omega_s/2
        p = params()
        spec = compute_spectrum(p)
        i = block_index(spec, p.j_total + 1)
        assert spec.eta_m[i] == 0.0
        assert spec.lambda_plus[i] == pytest.approx(4.5, abs=1e-12)
        assert spec.lambda_plus[i] == pytest.approx(
            (2 * p.g + p.omega_b) * p.j_total + p.omega_s / 2, abs=1e-12)
        # m = -J edge: the physical eigenvalue is E - G = (2g - omega_b) J - omega_s/2
        j = block_index(spec, -p.j_total)
        assert spec.eta_m[j] == 0.0
        assert spec.e_m[j] - spec.g_m[j] == pytest.approx(
            (2 * p.g - p.omega_b) * p.j_total - p.omega_s / 2, abs=1e-12)

    def test_zero_coupling_limit(self):
        # g = 0: F = |G| = |Delta|/2 and the mixing is trivial (d in {0, 1})
        spec = compute_spectrum(params(g=0.0))
        assert np.allclose(spec.f_m, abs(2.0) / 2)
        assert np.allclose(spec.d_plus, 1.0)  # Delta > 0 branch
        assert np.allclose(spec.d_minus, 0.0)

    def test_block_count_and_m_storage(self):
        for n in (1, 2, 5):
            spec = compute_spectrum(params(n=n))
            assert len(spec.two_m) == n + 2
            assert spec.two_m[0] == -n and spec.two_m[-1] == n + 2
            assert spec.two_m.dtype == np.int64

    def test_characteristic_polynomial_residual(self, rng):
        for _ in range(20):
            p = params(n=int(rng.integers(1, 9)), g=rng.uniform(-3, 3),
                       omega_s=rng.uniform(0.2, 5), omega_b=rng.uniform(0.2, 5),
                       t_bath=rng.uniform(0.5, 50))
            spec = compute_spectrum(p)
            for lam in (spec.lambda_plus, spec.lambda_minus):
                resid = lam ** 2 - 2 * spec.e_m * lam + spec.e_m ** 2 - spec.f_m ** 2
                assert np.all(np.abs(resid) < 1e-10 * (np.abs(lam) + 1))

    def test_eigenvector_normalization_and_orthogonality(self, rng):
        for _ in range(20):
            p = params(n=int(rng.integers(1, 9)), g=rng.uniform(-3, 3),
                       omega_s=rng.uniform(0.2, 5), omega_b=rng.uniform(0.2, 5))
            spec = compute_spectrum(p)
            live = spec.f_m > 0
            norm_p = spec.c_plus ** 2 + spec.d_plus ** 2
            norm_m = spec.c_minus ** 2 + spec.d_minus ** 2
            assert np.all(np.abs(norm_p[live] - 1) < 1e-12)
            assert np.all(np.abs(norm_m[live] - 1) < 1e-12)
            ortho = spec.c_plus * spec.c_minus + spec.d_plus * spec.d_minus
            assert np.all(np.abs(ortho[live]) < 1e-12)

    def test_gap_identity(self):
        spec = compute_spectrum(params(n=5, g=-0.7))
        assert np.allclose(spec.lambda_plus - spec.lambda_minus, 2 * spec.f_m)

    @given(st.integers(1, 10), st.floats(-3, 3), st.floats(0.2, 5), st.floats(0.2, 5))
    def test_f_dominates_g(self, n, g, omega_s, omega_b):
        spec = compute_spectrum(ModelParams(n, g, omega_s, omega_b, 1.0))
        assert np.all(spec.f_m >= np.abs(spec.g_m) - 1e-12)
        assert np.all(spec.f_m >= 0)


class TestThermalWeights:
    def test_partition_function_value(self):
        # N=4, omega_b=1, T=10: Q equals the direct sum over m = -2..2
        p = params(n=4)
        w = thermal_weights(p)
        direct = sum(math.exp(-m / 10) for m in range(-2, 3))
        assert w.q_value == pytest.approx(direct, rel=1e-12)
        assert w.q_value == pytest.approx(5.05014, abs=1e-5)

    def test_infinite_temperature_limit(self):
        w = thermal_weights(params(n=4, t_bath=1e9))
        assert np.all(np.abs(w.weights - 0.2) < 1e-9)

    def test_two_level_normalization(self):
        # N=1, omega_b=1, T=1: weights are (e^{1/2}, e^{-1/2}) normalized
        w = thermal_weights(params(n=1, t_bath=1.0))
        norm = math.exp(0.5) + math.exp(-0.5)
        assert w.weights[0] == pytest.approx(math.exp(0.5) / norm, rel=1e-14)
        assert w.weights[1] == pytest.approx(math.exp(-0.5) / norm, rel=1e-14)

    def test_normalization_and_ladder(self, rng):
        for _ in range(10):
            p = params(n=int(rng.integers(1, 40)), omega_b=rng.uniform(0.2, 5),
                       t_bath=rng.uniform(0.5, 50))
            w = thermal_weights(p)
            assert abs(w.weights.sum() - 1.0) < 1e-12
            ratios = w.weights[:-1] / w.weights[1:]
            assert np.all(np.abs(ratios / math.exp(p.omega_b / p.t_bath) - 1) < 1e-12)
            assert w.boltzmann_ratio == pytest.approx(math.exp(p.omega_b / p.t_bath))

    def test_shifted_partition_function_large_n(self):
        # closed shifted form vs direct geometric sum up to N = 10^4
        for n, omega_b, t_bath in ((10_000, 1.0, 0.5), (10_000, 2.0, 10.0), (321, 0.7, 3.0)):
            p = params(n=n, omega_b=omega_b, t_bath=t_bath)
            w = thermal_weights(p)
            beta = omega_b / t_bath
            direct = np.exp(-beta * np.arange(n + 1)).sum()
            assert w.q_shifted == pytest.approx(direct, rel=1e-12)
            assert np.isfinite(w.log_q)

    def test_overflow_safety(self):
        # e^{J omega_b/T} alone would overflow here; weights must stay finite
        w = thermal_weights(params(n=9000, omega_b=1.0, t_bath=1.0))
        assert np.all(np.isfinite(w.weights))
        assert abs(w.weights.sum() - 1.0) < 1e-12
        assert w.q_value == math.inf and np.isfinite(w.log_q)

    def test_negative_omega_b(self):
        w = thermal_weights(params(n=6, omega_b=-1.0, t_bath=2.0))
        assert abs(w.weights.sum() - 1.0) < 1e-12
        assert w.weights[-1] > w.weights[0]  # population inverted toward high m
