import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinstar import (BlochVector, DimensionTooLargeError, ModelParams,
                      compute_spectrum, evolve_bloch, full_hilbert_evolve,
                      full_hilbert_propagator, propagator_grid, propagator_sample,
                      thermal_weights)
from spinstar.dynamics import PropagatorSample


def make(n=4, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0):
    p = ModelParams(n_bath=n, g=g, omega_s=omega_s, omega_b=omega_b, t_bath=t_bath)
    return p, compute_spectrum(p), thermal_weights(p)


def random_params(rng, n):
    g = 0.0
    while g == 0.0:
        g = float(rng.uniform(-3, 3))
    return ModelParams(n_bath=n, g=g, omega_s=float(rng.uniform(0.2, 5)),
                       omega_b=float(rng.uniform(0.2, 5)),
                       t_bath=float(rng.uniform(0.5, 50)))


def random_bloch(rng):
    v = rng.normal(size=3)
    n = np.linalg.norm(v)
    if n > 1:
        v = v / (n * float(rng.uniform(1.0, 1.5)))
    return BlochVector.from_array(v)


class TestPropagatorSample:
    def test_initial_values(self):
        _, spec, w = make()
        s = propagator_sample(spec, w, 0.0)
        assert (s.x1, s.x2, s.z1, s.z2) == (1.0, 0.0, 1.0, 0.0)

    def test_zero_coupling_precession(self):
        p, spec, w = make(g=0.0)
        for t in (0.3, 1.7, 12.9):
            s = propagator_sample(spec, w, t)
            assert s.z1 == pytest.approx(1.0, abs=1e-14)
            assert s.z2 == pytest.approx(0.0, abs=1e-14)
            assert s.x1 ** 2 + s.x2 ** 2 == pytest.approx(1.0, abs=1e-14)

    def test_matches_oracle_implied_propagator(self):
        p, spec, w = make()
        s = propagator_sample(spec, w, 0.7)
        o = full_hilbert_propagator(p, 0.7)
        assert abs(s.x1 - o.x1) < 1e-10
        assert abs(s.x2 - o.x2) < 1e-10
        assert abs(s.z1 - o.z1) < 1e-10
        assert abs(s.z2 - o.z2) < 1e-10

    def test_physicality_bounds(self, rng):
        p, spec, w = make(n=7, g=-2.1, omega_s=0.9, omega_b=2.3, t_bath=3.0)
        for t in rng.uniform(0, 30, 50):
            s = propagator_sample(spec, w, t)
            assert abs(s.z1) <= 1 + 1e-9
            assert s.x1 ** 2 + s.x2 ** 2 <= 1 + 1e-9


class TestEvolveBloch:
    def test_identity_at_t0(self):
        _, spec, w = make()
        s = propagator_sample(spec, w, 0.0)
        v = evolve_bloch(s, BlochVector(0.0, 0.0, 1.0))
        assert (v.x, v.y, v.z) == (0.0, 0.0, 1.0)

    def test_direct_substitution(self):
        s = PropagatorSample(t=1.0, x1=0.6, x2=0.8, z1=0.5, z2=0.1)
        v = evolve_bloch(s, BlochVector(1.0, 0.0, 0.0))
        assert (v.x, v.y) == (0.6, -0.8)
        assert v.z == pytest.approx(0.1)

    def test_matches_oracle(self):
        p, spec, w = make()
        s = propagator_sample(spec, w, 0.7)
        v0 = BlochVector(0.0, 0.0, 1.0)
        got = evolve_bloch(s, v0).as_array()
        want = full_hilbert_evolve(p, v0, 0.7).as_array()
        assert np.abs(got - want).max() < 1e-10

    def test_affine_in_initial_state(self, rng):
        _, spec, w = make(n=3)
        s = propagator_sample(spec, w, 2.3)
        a = rng.normal(size=3) / 3
        b = rng.normal(size=3) / 3
        lam = 0.37
        mixed = evolve_bloch(s, BlochVector.from_array(lam * a + (1 - lam) * b)).as_array()
        parts = (lam * evolve_bloch(s, BlochVector.from_array(a)).as_array()
                 + (1 - lam) * evolve_bloch(s, BlochVector.from_array(b)).as_array())
        assert np.abs(mixed - parts).max() < 1e-12

    def test_stays_in_bloch_ball(self, rng):
        p, spec, w = make(n=5, g=2.0, t_bath=1.0)
        for t in rng.uniform(0, 25, 25):
            s = propagator_sample(spec, w, t)
            v = evolve_bloch(s, random_bloch(rng))
            assert v.norm() <= 1 + 1e-9


class TestOracle:
    def test_identity_at_t0(self):
        p, _, _ = make(n=2)
        v0 = BlochVector(0.3, -0.4, 0.5)
        v = full_hilbert_evolve(p, v0, 0.0)
        assert np.abs(v.as_array() - v0.as_array()).max() < 1e-12

    def test_zero_coupling_fixed_point(self):
        p, _, _ = make(n=2, g=0.0)
        v = full_hilbert_evolve(p, BlochVector(0.0, 0.0, 1.0), 5.0)
        assert np.abs(v.as_array() - [0, 0, 1]).max() < 1e-12

    def test_mutual_consistency_n2(self):
        p, spec, w = make(n=2)
        v0 = BlochVector(1.0, 0.0, 0.0)
        got = evolve_bloch(propagator_sample(spec, w, 0.3), v0).as_array()
        want = full_hilbert_evolve(p, v0, 0.3).as_array()
        assert np.abs(got - want).max() < 1e-10

    def test_dimension_limit(self):
        p = ModelParams(n_bath=13, g=1.0, omega_s=3.0, omega_b=1.0, t_bath=10.0)
        with pytest.raises(DimensionTooLargeError):
            full_hilbert_evolve(p, BlochVector(0, 0, 1), 0.1)

    def test_equivalence_small_sweep(self, rng):
        # light version of the acceptance sweep
        for n in (1, 2, 3):
            for _ in range(5):
                p = random_params(rng, n)
                spec = compute_spectrum(p)
                w = thermal_weights(p)
                for t in rng.uniform(0, 20, 3):
                    s = propagator_sample(spec, w, t)
                    for _ in range(2):
                        v0 = random_bloch(rng)
                        got = evolve_bloch(s, v0).as_array()
                        want = full_hilbert_evolve(p, v0, t).as_array()
                        assert np.abs(got - want).max() <= 1e-9


class TestPropagatorGrid:
    def test_matches_scalar_samples(self, rng):
        _, spec, w = make(n=6, g=-1.3, omega_s=1.1, omega_b=2.7, t_bath=4.0)
        grid = propagator_grid(spec, w, 0.1, 0.037, 400)
        for k in rng.integers(0, 400, 12):
            s = propagator_sample(spec, w, 0.1 + 0.037 * int(k))
            assert abs(grid.x1[k] - s.x1) < 1e-11
            assert abs(grid.x2[k] - s.x2) < 1e-11
            assert abs(grid.z1[k] - s.z1) < 1e-11
            assert abs(grid.z2[k] - s.z2) < 1e-11

    def test_thread_count_does_not_change_bits(self):
        _, spec, w = make(n=5)
        a = propagator_grid(spec, w, 0.0, 0.01, 5000, threads=1)
        b = propagator_grid(spec, w, 0.0, 0.01, 5000, threads=4)
        assert np.array_equal(a.x1, b.x1) and np.array_equal(a.x2, b.x2)
        assert np.array_equal(a.z1, b.z1) and np.array_equal(a.z2, b.z2)

    def test_sector_selection(self):
        _, spec, w = make()
        g = propagator_grid(spec, w, 0.0, 0.1, 10, need_x=False)
        assert g.x1 is None and g.z1 is not None
        g = propagator_grid(spec, w, 0.0, 0.1, 10, need_z=False)
        assert g.z1 is None and g.x1 is not None


@given(st.floats(0.0, 10.0), st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))
def test_propagator_sample_z_bound_property(t, a, b):
    p = ModelParams(n_bath=3, g=0.8, omega_s=2.0, omega_b=1.0, t_bath=5.0)
    spec = compute_spectrum(p)
    w = thermal_weights(p)
    s = propagator_sample(spec, w, t)
    assert s.z1 <= 1 + 1e-12 and abs(s.z1) <= 1 + 1e-9
    v = evolve_bloch(s, BlochVector(a, b, 0.0))
    assert v.norm() <= 1 + 1e-9
