"""Physics-layer unit tests: geometry, phases, gains, AN projection, SINR."""

from __future__ import annotations

import math

import numpy as np
import pytest

from spwtsim import (Position, SubcarrierPlan, SystemConfig, an_vector, bob_sinr,
                     element_distance, select_random, sinr, steering_gain,
                     steering_phase, steering_vector, to_db)
from spwtsim.model import (approx_phase_bound, coherent_sum, draw_noise_basis,
                           precoder, steering_phases)
from spwtsim.pools import build_pss

BOB = Position.from_degrees(60.0, 500.0)

# Frozen from a 50-digit mpmath evaluation of the exact steering phase
# 2*pi*(f_c + k*df)*R_n/c - 2*pi*f_c*R/c at the default config,
# position (60 deg, 500 m):
PHASE_ORACLE = {
    (2, 7): -0.837794692871570077844487,
    (3, 4547): 472.9715178028503,
}


@pytest.fixture
def config() -> SystemConfig:
    return SystemConfig()


@pytest.fixture
def plan(config) -> SubcarrierPlan:
    return select_random(build_pss(config.num_subcarriers), config.num_antennas, seed=11)


class TestSystemConfig:
    def test_defaults_are_consistent(self, config):
        assert config.alpha1 + config.alpha2 == 1.0
        assert config.wavelength_m == pytest.approx(0.1)
        assert config.element_spacing_m == pytest.approx(config.wavelength_m / 2)
        assert config.snr_db == pytest.approx(10.0)

    @pytest.mark.parametrize("kwargs", [
        {"alpha1": 0.6, "alpha2": 0.6},
        {"alpha1": -0.1, "alpha2": 1.1},
        {"num_antennas": 1},
        {"num_antennas": 200, "num_subcarriers": 100},
        {"total_power": 0.0},
        {"element_spacing_m": -0.05},
        # narrowband assumption: N_S * df must stay below 0.1 * f_c
        {"num_subcarriers": 16384, "subchannel_bw_hz": 1e6},
    ])
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SystemConfig(**kwargs)

    def test_position_validation(self):
        with pytest.raises(ValueError):
            Position(angle_rad=-0.1, distance_m=10.0)
        with pytest.raises(ValueError):
            Position(angle_rad=1.0, distance_m=0.0)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            SubcarrierPlan(indices=(1, 1, 2))
        with pytest.raises(ValueError):
            SubcarrierPlan(indices=(-1, 2))
        with pytest.raises(ValueError):
            SubcarrierPlan(indices=())


class TestElementDistance:
    def test_reference_element(self, config):
        for pos in (BOB, Position.from_degrees(10.0, 42.0)):
            assert element_distance(config, pos, 1) == pos.distance_m

    def test_broadside(self, config):
        pos = Position.from_degrees(90.0, 123.0)
        for n in (1, 5, 120):
            assert element_distance(config, pos, n) == pytest.approx(123.0, abs=1e-12)

    def test_direct_substitution(self, config):
        # R - (n-1) d cos(theta) = 500 - 2*0.05*0.5
        assert element_distance(config, BOB, 3) == pytest.approx(499.95)

    def test_out_of_range(self, config):
        with pytest.raises(ValueError):
            element_distance(config, BOB, 0)
        with pytest.raises(ValueError):
            element_distance(config, BOB, config.num_antennas + 1)


class TestSteeringPhase:
    def test_reference_element_zero_subcarrier(self, config):
        plan = SubcarrierPlan(indices=(0,) + tuple(range(50, 169)))
        assert steering_phase(config, plan, BOB, 1) == 0.0

    def test_reference_element_reduces_to_subcarrier_term(self, config):
        # R_1 = R cancels the carrier reference phase: psi_1 = 2 pi k_1 df R / c
        plan = SubcarrierPlan(indices=(13,) + tuple(range(100, 219)))
        expected = 2 * math.pi * 13 * config.subchannel_bw_hz * 500.0 / config.lightspeed_m_s
        assert steering_phase(config, plan, BOB, 1) == pytest.approx(expected, rel=1e-14)

    def test_matches_high_precision_oracle(self, config):
        plan = SubcarrierPlan(indices=(0, 7, 4547) + tuple(range(10000, 10117)))
        for (n, k), expected in PHASE_ORACLE.items():
            assert plan.indices[n - 1] == k
            got = steering_phase(config, plan, BOB, n, mode="exact")
            assert got == pytest.approx(expected, rel=1e-12)

    def test_approx_mode_drops_cross_term(self, config, plan):
        pos = Position.from_degrees(47.0, 350.0)
        k = plan.as_array()
        n_off = np.arange(config.num_antennas)
        cross = (2 * math.pi * k * config.subchannel_bw_hz * n_off
                 * config.element_spacing_m * math.cos(pos.angle_rad)
                 / config.lightspeed_m_s)
        exact = steering_phases(config, plan, pos, "exact")
        approx = steering_phases(config, plan, pos, "approx")
        np.testing.assert_allclose(exact - approx, -cross, rtol=1e-10, atol=1e-12)

    def test_discrepancy_obeys_analytic_bound(self, config, plan):
        bound = approx_phase_bound(config, plan)
        rng = np.random.default_rng(3)
        for _ in range(50):
            pos = Position(rng.uniform(0, math.pi), rng.uniform(1.0, 2000.0))
            gap = np.abs(steering_phases(config, plan, pos, "exact")
                         - steering_phases(config, plan, pos, "approx"))
            assert gap.max() <= bound * (1 + 1e-12)

    def test_bad_mode_and_index(self, config, plan):
        with pytest.raises(ValueError):
            steering_phase(config, plan, BOB, 0)
        with pytest.raises(ValueError):
            steering_phases(config, plan, BOB, mode="fast")


class TestSteeringGain:
    def test_gain_at_bob_is_sqrt_nt(self, config, plan):
        g = steering_gain(config, plan, BOB, BOB)
        assert g.real == pytest.approx(math.sqrt(config.num_antennas), rel=1e-15)
        assert abs(g.imag) < 1e-12

    def test_antipodal_cancellation(self):
        # two antennas, phase difference pi between the summands -> g = 0
        config = SystemConfig(num_antennas=2, num_subcarriers=16384)
        plan = SubcarrierPlan(indices=(0, 15000))
        # pick a distance offset so (k2-k1) df dR / c = 1/2 cycle at theta = 90 deg
        # (broadside kills the angle term for both modes)
        d_r = 0.5 * config.lightspeed_m_s / (15000 * config.subchannel_bw_hz)
        bob = Position.from_degrees(90.0, 500.0)
        pos = Position.from_degrees(90.0, 500.0 + d_r)
        g = steering_gain(config, plan, bob, pos)
        assert abs(g) < 1e-9

    def test_triangle_bound_random_positions(self, config, plan):
        limit = math.sqrt(config.num_antennas)
        rng = np.random.default_rng(7)
        for _ in range(200):
            pos = Position(rng.uniform(0, math.pi), rng.uniform(1.0, 1500.0))
            assert abs(steering_gain(config, plan, BOB, pos)) <= limit + 1e-9

    def test_matches_term_by_term_oracle(self, config):
        # brute-force summation with scalar math, no vectorization shortcuts;
        # phases in the cancellation-free form k df R_n - f_c (n-1) d cos(theta)
        plan = select_random(build_pss(config.num_subcarriers), config.num_antennas, seed=5)
        eve = Position.from_degrees(60.0, 600.0)

        def psi(pos: Position, n: int) -> float:
            k = plan.indices[n - 1]
            ang = (n - 1) * config.element_spacing_m * math.cos(pos.angle_rad)
            return (2 * math.pi * (k * config.subchannel_bw_hz * (pos.distance_m - ang)
                                   - config.carrier_freq_hz * ang)
                    / config.lightspeed_m_s)

        acc = 0.0 + 0.0j
        for n in range(1, config.num_antennas + 1):
            dphi = psi(BOB, n) - psi(eve, n)
            acc += complex(math.cos(dphi), math.sin(dphi))
        oracle = abs(acc / math.sqrt(config.num_antennas)) ** 2
        got = abs(steering_gain(config, plan, BOB, eve)) ** 2
        assert got == pytest.approx(oracle, rel=1e-12)

    def test_matches_high_precision_sum(self, config):
        # 50-digit evaluation of the raw (unreduced) phase definition; bounds
        # the true error of the double-precision path, not just its ordering
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        plan = select_random(build_pss(config.num_subcarriers), config.num_antennas, seed=5)
        eve = Position.from_degrees(60.0, 600.0)
        fc, df = mp.mpf(config.carrier_freq_hz), mp.mpf(config.subchannel_bw_hz)
        c, d = mp.mpf(config.lightspeed_m_s), mp.mpf(config.element_spacing_m)
        acc = mp.mpc(0)
        for n in range(1, config.num_antennas + 1):
            k = plan.indices[n - 1]
            dphi = mp.mpf(0)
            for pos, sign in ((BOB, 1), (eve, -1)):
                r_n = mp.mpf(pos.distance_m) - (n - 1) * d * mp.cos(mp.mpf(pos.angle_rad))
                psi = 2 * mp.pi * ((fc + k * df) * r_n - fc * pos.distance_m) / c
                dphi += sign * psi
            acc += mp.exp(1j * dphi)
        oracle = float(abs(acc) ** 2 / config.num_antennas)
        got = abs(steering_gain(config, plan, BOB, eve)) ** 2
        assert got == pytest.approx(oracle, rel=1e-9)

    def test_precoder_unit_norm(self, config, plan):
        v = precoder(config, plan, BOB)
        assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)


class TestAnVector:
    def test_projector_annihilates_own_direction(self, config, plan):
        h = steering_vector(config, plan, BOB)
        w = an_vector(h, h)
        assert np.linalg.norm(w) < 1e-12

    def test_null_space_identity_1000_draws(self, config, plan):
        h = steering_vector(config, plan, BOB)
        rng = np.random.default_rng(17)
        for _ in range(1000):
            z = draw_noise_basis(config.num_antennas, rng)
            w = an_vector(h, z)
            assert abs(np.vdot(h, w)) <= 1e-12 * np.linalg.norm(z)

    def test_matches_dense_projector_oracle(self):
        # explicit matrix product w = (I - h h^H / N) z / sqrt(N-1), N = 4
        rng = np.random.default_rng(23)
        h = np.exp(1j * rng.uniform(0, 2 * math.pi, 4))
        z = draw_noise_basis(4, rng)
        proj = np.eye(4, dtype=complex) - np.outer(h, h.conj()) / 4
        oracle = proj @ z / math.sqrt(3)
        got = an_vector(h, z)
        assert np.linalg.norm(got - oracle) < 1e-12
        assert np.linalg.norm(got) == pytest.approx(np.linalg.norm(oracle), rel=1e-12)

    def test_expected_power_is_unity(self, config, plan):
        h = steering_vector(config, plan, BOB)
        rng = np.random.default_rng(29)
        powers = [np.linalg.norm(an_vector(h, draw_noise_basis(config.num_antennas, rng))) ** 2
                  for _ in range(4000)]
        assert np.mean(powers) == pytest.approx(1.0, rel=0.05)

    def test_too_few_antennas(self):
        with pytest.raises(ValueError):
            an_vector(np.array([1.0 + 0j]), np.array([1.0 + 0j]))


class TestSinr:
    def test_bob_value_matches_identity(self, config, plan):
        got = sinr(config, plan, BOB, BOB)
        assert got == pytest.approx(bob_sinr(config), rel=1e-9)
        assert to_db(got) == pytest.approx(6.9897, abs=1e-3)  # the 6.99 dB point

    def test_no_an_reduces_to_pure_beam(self, plan):
        config = SystemConfig(alpha1=1.0, alpha2=0.0)
        eve = Position.from_degrees(58.0, 420.0)
        g2 = abs(steering_gain(config, plan, BOB, eve)) ** 2
        expected = config.total_power * g2 / (config.num_antennas * config.noise_power)
        assert sinr(config, plan, BOB, eve) == pytest.approx(expected, rel=1e-12)

    def test_monte_carlo_converges_to_analytic(self, config, plan):
        eve = Position.from_degrees(61.5, 540.0)
        analytic = sinr(config, plan, BOB, eve, mode="analytic")
        mc = sinr(config, plan, BOB, eve, mode="monte_carlo",
                  num_realizations=10000, seed=42)
        assert abs(to_db(mc) - to_db(analytic)) < 0.1

    def test_monte_carlo_seed_determinism(self, config, plan):
        eve = Position.from_degrees(40.0, 800.0)
        a = sinr(config, plan, BOB, eve, mode="monte_carlo", num_realizations=50, seed=9)
        b = sinr(config, plan, BOB, eve, mode="monte_carlo", num_realizations=50, seed=9)
        assert a == b

    def test_bob_value_independent_of_plan_and_seed(self, config):
        pool = build_pss(config.num_subcarriers)
        expected = bob_sinr(config)
        for seed in range(10):
            plan = select_random(pool, config.num_antennas, seed=seed)
            assert sinr(config, plan, BOB, BOB) == pytest.approx(expected, rel=1e-9)
            assert sinr(config, plan, BOB, BOB, mode="monte_carlo",
                        num_realizations=5, seed=seed) == pytest.approx(expected, rel=1e-9)

    def test_invalid_modes(self, config, plan):
        with pytest.raises(ValueError):
            sinr(config, plan, BOB, BOB, mode="exact")
        with pytest.raises(ValueError):
            sinr(config, plan, BOB, BOB, mode="monte_carlo", num_realizations=0)

    def test_coherent_sum_exact_at_bob(self, config, plan):
        assert coherent_sum(config, plan, BOB, BOB) == complex(config.num_antennas)
