import math

import numpy as np
import pytest

from thermocollide import (
    CollisionChannel,
    ConvergenceError,
    GibbsSpec,
    PopulationState,
    apply,
    build_jaynes_cummings,
    build_swap,
    channel_matrix,
    collide_with_audit,
    gibbs_populations,
    pseudo_thermalize,
    relative_entropy,
    shannon_entropy,
    trace_distance,
)


def system_gibbs(beta_omega: float, d: int) -> PopulationState:
    return gibbs_populations(GibbsSpec(beta_omega, 1.0, d))


class TestChannelMatrix:
    def test_swap_columns_equal_bath_state(self):
        bath = GibbsSpec(0.8, 1.0, 3)
        channel = channel_matrix(build_swap(3), bath)
        expected = gibbs_populations(bath).probs
        for column in channel.matrix.T:
            np.testing.assert_allclose(column, expected, atol=1e-14)

    def test_zero_angle_gives_identity(self):
        channel = channel_matrix(build_jaynes_cummings(3, 3, 0.0), GibbsSpec(1.0, 1.0, 3))
        np.testing.assert_allclose(channel.matrix, np.eye(3), atol=1e-14)

    def test_half_pi_two_qubits_equals_swap(self):
        bath = GibbsSpec(1.0, math.log(2), 2)
        jc = channel_matrix(build_jaynes_cummings(2, 2, math.pi / 2), bath)
        swap = channel_matrix(build_swap(2), bath)
        assert np.abs(jc.matrix - swap.matrix).max() <= 1e-12

    def test_fixed_point_matches_power_iteration(self):
        channel = channel_matrix(
            build_jaynes_cummings(2, 2, math.pi / 4), GibbsSpec(1.0, 1.0, 2)
        )
        state = np.array([1.0, 0.0])
        for _ in range(2000):
            state = channel.matrix @ state
            state /= state.sum()
        np.testing.assert_allclose(state, system_gibbs(1.0, 2).probs, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="particle dimension"):
            channel_matrix(build_jaynes_cummings(2, 3, 1.0), GibbsSpec(1.0, 1.0, 2))

    def test_column_stochastic_and_stationary_grid(self):
        # seeded grid: both interactions, dims 2..6, a spread of beta*omega
        rng = np.random.default_rng(101)
        combos = 0
        while combos < 120:
            d_system = int(rng.integers(2, 7))
            if rng.random() < 0.3:
                unitary = build_swap(d_system)
                d_particle = d_system
            else:
                d_particle = int(rng.integers(2, 7))
                unitary = build_jaynes_cummings(
                    d_system, d_particle, float(rng.uniform(0.1, 2 * math.pi))
                )
            bath = GibbsSpec(float(rng.uniform(0.0, 4.0)), 1.0, d_particle)
            channel = channel_matrix(unitary, bath)
            assert np.abs(channel.matrix.sum(axis=0) - 1.0).max() <= 1e-12
            fixed = system_gibbs(bath.beta * bath.omega, d_system)
            assert trace_distance(apply(channel, fixed), fixed) <= 1e-12
            combos += 1

    def test_constructor_rejects_non_stochastic(self):
        with pytest.raises(ValueError, match="stochastic"):
            CollisionChannel(np.array([[0.5, 0.0], [0.0, 1.0]]), GibbsSpec(1.0, 1.0, 2))


class TestApply:
    def test_identity_channel(self):
        channel = channel_matrix(build_jaynes_cummings(3, 3, 0.0), GibbsSpec(1.0, 1.0, 3))
        state = PopulationState([0.5, 0.3, 0.2])
        np.testing.assert_allclose(apply(channel, state).probs, state.probs, atol=1e-15)

    def test_swap_installs_bath_state(self):
        bath = GibbsSpec(0.5, 1.0, 4)
        channel = channel_matrix(build_swap(4), bath)
        state = PopulationState([1.0, 0.0, 0.0, 0.0])
        np.testing.assert_allclose(
            apply(channel, state).probs, gibbs_populations(bath).probs, atol=1e-14
        )

    def test_fixed_point_is_fixed(self):
        channel = channel_matrix(
            build_jaynes_cummings(4, 3, 1.1), GibbsSpec(0.7, 1.0, 3)
        )
        fixed = channel.fixed_point()
        assert trace_distance(apply(channel, fixed), fixed) <= 1e-12

    def test_contractivity(self):
        rng = np.random.default_rng(73)
        channel = channel_matrix(
            build_jaynes_cummings(4, 4, 0.9), GibbsSpec(1.2, 1.0, 4)
        )
        for _ in range(200):
            p = rng.random(4)
            q = rng.random(4)
            sp = PopulationState(p / p.sum())
            sq = PopulationState(q / q.sum())
            before = trace_distance(sp, sq)
            after = trace_distance(apply(channel, sp), apply(channel, sq))
            assert after <= before + 1e-12


class TestPseudoThermalize:
    def test_already_at_target(self):
        channel = channel_matrix(
            build_jaynes_cummings(3, 3, 1.0), GibbsSpec(1.0, 1.0, 3)
        )
        target = channel.fixed_point()
        _, count = pseudo_thermalize(target, channel, target, 1e-9)
        assert count == 0

    def test_swap_takes_one_collision(self):
        channel = channel_matrix(build_swap(3), GibbsSpec(1.0, 1.0, 3))
        start = PopulationState([1.0, 0.0, 0.0])
        state, count = pseudo_thermalize(start, channel, channel.fixed_point(), 1e-9)
        assert count == 1
        assert trace_distance(state, channel.fixed_point()) == 0.0

    def test_collision_count_regression(self):
        # frozen by an oracle run of this exact iteration
        channel = channel_matrix(
            build_jaynes_cummings(5, 3, math.pi / 2), GibbsSpec(1.0, 1.0, 3)
        )
        start = PopulationState([1.0, 0.0, 0.0, 0.0, 0.0])
        _, count = pseudo_thermalize(
            start, channel, system_gibbs(1.0, 5), 1e-9
        )
        assert count == 38

    def test_identity_channel_never_converges(self):
        # theta = 2*pi turns every two-level block into the identity
        channel = channel_matrix(
            build_jaynes_cummings(2, 2, 2 * math.pi), GibbsSpec(1.0, 1.0, 2)
        )
        start = PopulationState([1.0, 0.0])
        with pytest.raises(ConvergenceError) as info:
            pseudo_thermalize(start, channel, channel.fixed_point(), 1e-9, 1000)
        assert info.value.distance > 1e-3

    def test_frozen_exchange_block_never_converges(self):
        # at theta = pi/2 the hop between |4,0> and |3,1> has amplitude 2,
        # so that block evolves by -identity and the top level decouples:
        # its population is conserved and the Gibbs target is unreachable
        channel = channel_matrix(
            build_jaynes_cummings(5, 2, math.pi / 2), GibbsSpec(1.0, 1.0, 2)
        )
        np.testing.assert_allclose(channel.matrix[:, 4], np.eye(5)[4], atol=1e-14)
        np.testing.assert_allclose(channel.matrix[4, :], np.eye(5)[4], atol=1e-14)
        start = PopulationState([1.0, 0.0, 0.0, 0.0, 0.0])
        with pytest.raises(ConvergenceError) as info:
            pseudo_thermalize(start, channel, system_gibbs(1.0, 5), 1e-9, 5000)
        assert info.value.distance > 1e-3

    def test_rejects_bad_eps(self):
        channel = channel_matrix(build_swap(2), GibbsSpec(1.0, 1.0, 2))
        start = PopulationState([1.0, 0.0])
        with pytest.raises(ValueError, match="eps"):
            pseudo_thermalize(start, channel, channel.fixed_point(), 0.0)


class TestCollideWithAudit:
    def test_identity_collision_changes_nothing(self):
        unitary = build_jaynes_cummings(3, 3, 0.0)
        bath = GibbsSpec(1.0, 1.0, 3)
        state = PopulationState([0.5, 0.3, 0.2])
        post, audit = collide_with_audit(unitary, state, bath)
        np.testing.assert_allclose(post.probs, state.probs, atol=1e-15)
        assert audit.heat_to_system == pytest.approx(0.0, abs=1e-14)
        assert audit.entropy_change_system == pytest.approx(0.0, abs=1e-14)
        assert audit.entropy_change_particle == pytest.approx(0.0, abs=1e-14)
        assert audit.landauer_gap == pytest.approx(0.0, abs=1e-14)

    def test_swap_hands_system_state_to_particle(self):
        unitary = build_swap(4)
        bath = GibbsSpec(0.9, 1.0, 4)
        state = PopulationState([0.4, 0.3, 0.2, 0.1])
        post, audit = collide_with_audit(unitary, state, bath)
        np.testing.assert_allclose(audit.particle_post.probs, state.probs, atol=1e-14)
        np.testing.assert_allclose(post.probs, gibbs_populations(bath).probs, atol=1e-14)

    def test_two_qubit_exchange_heat_oracle(self):
        # independent 4x4 joint-space computation of the same collision
        theta = math.pi / 2
        bath = GibbsSpec(1.0, math.log(2), 2)
        q = gibbs_populations(bath).probs
        joint_in = np.diag(np.kron(np.array([1.0, 0.0]), q))
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        coupling = np.zeros((4, 4), dtype=complex)
        coupling[1, 2] = coupling[2, 1] = 1.0  # |0,1> <-> |1,0| exchange
        evals, evecs = np.linalg.eigh(coupling)
        full = (evecs * np.exp(-1j * theta * evals)) @ evecs.conj().T
        joint_out = full @ joint_in @ full.conj().T
        marginal = np.real(np.diag(joint_out)).reshape(2, 2).sum(axis=1)
        oracle_heat = bath.omega * (marginal @ np.arange(2) - 0.0)
        assert oracle_heat == pytest.approx(bath.omega / 3, abs=1e-12)

        post, audit = collide_with_audit(
            build_jaynes_cummings(2, 2, theta), PopulationState([1.0, 0.0]), bath
        )
        assert audit.heat_to_system == pytest.approx(oracle_heat, abs=1e-12)
        assert audit.heat_to_system == pytest.approx(bath.omega / 3, abs=1e-12)

    def test_audit_invariants_seeded(self):
        rng = np.random.default_rng(59)
        for _ in range(300):
            d_system = int(rng.integers(2, 7))
            d_particle = int(rng.integers(2, 7))
            unitary = build_jaynes_cummings(
                d_system, d_particle, float(rng.uniform(0.05, 3.0))
            )
            bath = GibbsSpec(float(rng.uniform(0.0, 3.0)), float(rng.uniform(0.2, 5.0)), d_particle)
            p = rng.random(d_system)
            state = PopulationState(p / p.sum())
            post, audit = collide_with_audit(unitary, state, bath)
            # energy bookkeeping: system gain equals particle loss
            scale = max(
                abs(audit.heat_to_system), abs(audit.particle_energy_change), bath.omega
            )
            assert abs(audit.heat_to_system + audit.particle_energy_change) <= 1e-10 * scale
            # Landauer identity for Gibbs-born particles
            assert abs(audit.landauer_gap) <= 1e-10
            # fresh-particle subadditivity
            assert (
                audit.entropy_change_system + audit.entropy_change_particle >= -1e-10
            )

    def test_entropy_fields_match_direct_recompute(self):
        unitary = build_jaynes_cummings(3, 2, 1.2)
        bath = GibbsSpec(0.6, 1.0, 2)
        state = PopulationState([0.6, 0.3, 0.1])
        post, audit = collide_with_audit(unitary, state, bath)
        assert audit.entropy_change_system == pytest.approx(
            shannon_entropy(post) - shannon_entropy(state), abs=1e-14
        )
        pre = gibbs_populations(bath)
        assert audit.landauer_gap == pytest.approx(
            bath.beta * (-audit.particle_energy_change)
            - (shannon_entropy(pre) - shannon_entropy(audit.particle_post))
            + relative_entropy(audit.particle_post, pre),
            abs=1e-14,
        )
