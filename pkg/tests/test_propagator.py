import math

import numpy as np
import pytest

from fluxring import (
    AnalyticSpreadParams,
    LatticeSpec,
    PacketSpec,
    SpectralPropagator,
    SpinState,
    Topology,
    analytic_spread_packet,
    autocorrelation,
    build_hamiltonian,
    eigensystem,
    evolve_dense_oracle,
    folded_chain_center,
    gaussian_packet,
    reflect_map,
    translate,
)
from fluxring.analysis import spin_reduced_state


def ring(n, flux=0.0):
    return LatticeSpec(Topology.RING, n, 1.0, flux)


def chain(n):
    return LatticeSpec(Topology.CHAIN, n)


def random_state(rng, n):
    vec = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    vec /= np.linalg.norm(vec)
    return SpinState(up=vec[0], down=vec[1])


def state_distance(a, b):
    return math.sqrt(
        float(np.sum(np.abs(a.up - b.up) ** 2) + np.sum(np.abs(a.down - b.down) ** 2))
    )


class TestEvolve:
    def test_zero_time_identity(self):
        rng = np.random.default_rng(3)
        state = random_state(rng, 12)
        prop = SpectralPropagator.from_lattice(ring(12, 2.0))
        out = prop.evolve(state, 0.0)
        assert state_distance(out, state) < 1e-14

    def test_eigenmode_is_stationary(self):
        spec = ring(10, 1.5)
        basis = eigensystem(spec)
        mode = SpinState(up=basis.modes[:, 3], down=np.zeros(10))
        prop = SpectralPropagator(basis)
        out = prop.evolve(mode, 5.5)
        # densities unchanged, only a global phase acquired
        assert np.allclose(out.site_density(), mode.site_density(), atol=1e-14)
        assert abs(np.vdot(mode.up, out.up)) == pytest.approx(1.0, abs=1e-13)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(11)
        spec = ring(8, 2.0)
        h = build_hamiltonian(spec)
        prop = SpectralPropagator.from_lattice(spec)
        state = random_state(rng, 8)
        a = prop.evolve(state, 3.7)
        b = evolve_dense_oracle(h, state, 3.7)
        assert state_distance(a, b) < 1e-10

    def test_unitarity_long_times(self):
        rng = np.random.default_rng(5)
        prop = SpectralPropagator.from_lattice(ring(30, 7.1))
        state = random_state(rng, 30)
        for t in (1e2, 1e4, 1e5, -1e5):
            assert prop.evolve(state, t).norm() == pytest.approx(1.0, abs=1e-12)

    def test_composition(self):
        rng = np.random.default_rng(8)
        prop = SpectralPropagator.from_lattice(chain(16))
        state = random_state(rng, 16)
        a = prop.evolve(prop.evolve(state, 2.3), 4.1)
        b = prop.evolve(state, 6.4)
        assert state_distance(a, b) < 1e-11

    def test_energy_and_spin_conserved(self):
        spec = ring(32, 8.0)
        h = build_hamiltonian(spec)
        prop = SpectralPropagator.from_lattice(spec)
        rng = np.random.default_rng(21)
        state = random_state(rng, 32)

        def energy(s):
            return float(
                np.real(np.vdot(s.up, h @ s.up) + np.vdot(s.down, h @ s.down))
            )

        e0 = energy(state)
        rho0 = spin_reduced_state(state)
        for t in (0.5, 17.0, 400.0, 1e4):
            out = prop.evolve(state, t)
            assert abs(energy(out) - e0) <= 1e-10 * max(abs(e0), 2.0)
            assert np.abs(spin_reduced_state(out) - rho0).max() < 1e-12

    def test_dimension_mismatch_rejected(self):
        rng = np.random.default_rng(1)
        prop = SpectralPropagator.from_lattice(ring(8))
        with pytest.raises(ValueError):
            prop.evolve(random_state(rng, 9), 1.0)


class TestDenseOracle:
    def test_two_site_rabi_transfer(self):
        # two-site hop: |1> fully transfers to |2> at t = pi/2 (J = 1)
        h = np.array([[0.0, -1.0], [-1.0, 0.0]], dtype=complex)
        state = SpinState(up=np.array([1.0, 0.0]), down=np.zeros(2))
        out = evolve_dense_oracle(h, state, math.pi / 2)
        assert abs(out.up[1]) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert abs(out.up[0]) < 1e-12

    def test_zero_time_identity(self):
        h = build_hamiltonian(ring(5, 1.0))
        state = SpinState(up=np.eye(5)[2] + 0j, down=np.zeros(5))
        out = evolve_dense_oracle(h, state, 0.0)
        assert state_distance(out, state) < 1e-15

    def test_large_instance_rejected(self):
        h = np.zeros((65, 65), dtype=complex)
        state = SpinState(up=np.zeros(65), down=np.zeros(65))
        with pytest.raises(ValueError):
            evolve_dense_oracle(h, state, 1.0)

    @pytest.mark.parametrize("n", [4, 8, 12])
    def test_cross_validation_random(self, n):
        rng = np.random.default_rng(100 + n)
        for flux in (0.0, 1.0, 2.7):
            spec = ring(n, flux)
            h = build_hamiltonian(spec)
            prop = SpectralPropagator.from_lattice(spec)
            for _ in range(25):
                state = random_state(rng, n)
                t = rng.uniform(0.0, 20.0)
                assert state_distance(
                    prop.evolve(state, t), evolve_dense_oracle(h, state, t)
                ) < 1e-10


class TestTranslate:
    def test_full_revolution_identity(self):
        rng = np.random.default_rng(2)
        state = random_state(rng, 14)
        out = translate(state, ring(14), 14.0)
        assert state_distance(out, state) < 1e-14

    def test_integer_permutation_exact(self):
        state = SpinState(up=np.eye(10)[4] + 0j, down=np.zeros(10))  # site 5
        out = translate(state, ring(10), 3.0)
        assert out.up[7] == 1.0  # site 8
        assert np.abs(out.up).sum() == 1.0

    def test_composition_fractional(self):
        rng = np.random.default_rng(9)
        state = random_state(rng, 16)
        lat = ring(16)
        a = translate(translate(state, lat, 1.3), lat, 2.2)
        b = translate(state, lat, 3.5)
        assert state_distance(a, b) < 1e-12

    def test_chain_rejected(self):
        state = SpinState(up=np.zeros(10), down=np.zeros(10))
        with pytest.raises(ValueError):
            translate(state, chain(10), 1.0)

    def test_matches_evolution_in_linear_regime(self):
        # rigid translation at v = 2J tracks the exact evolution closely
        lat = ring(100, 25.0)
        with pytest.warns(UserWarning):
            state = gaussian_packet(lat, PacketSpec(alpha=0.1, center=50.0))
        prop = SpectralPropagator.from_lattice(lat)
        for t in (5.0, 20.0, 35.0, 50.0):
            moved = translate(state, lat, 2.0 * t)
            evolved = prop.evolve(state, t)
            assert autocorrelation(moved, evolved) >= 0.99


class TestAnalyticSpread:
    def test_zero_time_reproduces_packet(self):
        params = AnalyticSpreadParams(alpha0=0.3, k0=0.2, center0=50.0)
        approx = analytic_spread_packet(params, 100, 0.0)
        exact = gaussian_packet(
            ring(100), PacketSpec(alpha=0.3, center=50.0, k0=0.2)
        )
        assert state_distance(approx, exact) < 1e-14
        assert params.width_at(0.0) == 0.3

    def test_spreading_width_value(self):
        params = AnalyticSpreadParams(alpha0=0.3, k0=0.0, center0=50.0)
        assert params.width_at(90.0) == pytest.approx(0.018483337593629044, abs=1e-15)

    def test_matches_exact_evolution_density(self):
        # quadratic-band prediction against the exact band on a large ring
        n = 400
        lat = ring(n)
        state = gaussian_packet(
            lat, PacketSpec(alpha=0.1, center=50.0, k0=0.05 * math.pi)
        )
        prop = SpectralPropagator.from_lattice(lat)
        exact = prop.evolve(state, 30.0).site_density()
        params = AnalyticSpreadParams(alpha0=0.1, k0=0.05 * math.pi, center0=50.0)
        approx = analytic_spread_packet(params, n, 30.0).site_density()
        assert np.abs(exact - approx).max() <= 5e-3

    def test_norm_is_one(self):
        params = AnalyticSpreadParams(alpha0=0.2, k0=0.1, center0=30.0)
        assert analytic_spread_packet(params, 64, 12.0).norm() == pytest.approx(
            1.0, abs=1e-12
        )


class TestReflectMap:
    def test_wall_is_fixed_point(self):
        pos, sign = reflect_map(101.0, 100)
        assert pos == 101.0
        assert sign == -1

    def test_mirror_value(self):
        pos, sign = reflect_map(105.0, 100)
        assert pos == 97.0
        assert sign == -1

    def test_folded_trajectory_periodic_and_bounded(self):
        n = 100
        time_period = 2 * (n + 1) / 2.0  # distance 2(N+1) at velocity 2
        for t in (0.0, 13.0, 77.7, 150.0):
            a = folded_chain_center(50.0, 2.0, t, n)
            assert a == pytest.approx(
                folded_chain_center(50.0, 2.0, t + time_period, n), abs=1e-9
            )
            assert 0.0 <= a <= n + 1

    def test_folded_matches_exact_peak(self):
        # exact density peak follows the folded path away from the walls
        n = 100
        lat = chain(n)
        with pytest.warns(UserWarning):
            state = gaussian_packet(
                lat, PacketSpec(alpha=0.1, center=50.0, k0=math.pi / 2)
            )
        prop = SpectralPropagator.from_lattice(lat)
        for t in (10.0, 40.0, 60.0, 90.0, 120.0, 160.0, 190.0):
            pred = folded_chain_center(50.0, 2.0, t, n)
            if not 15.0 <= pred <= n + 1 - 15.0:
                continue
            peak = int(np.argmax(prop.evolve(state, t).site_density())) + 1
            assert abs(peak - pred) <= 2.0
