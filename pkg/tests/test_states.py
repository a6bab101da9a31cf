import math

import numpy as np
import pytest

from thermocollide import (
    GibbsSpec,
    PopulationState,
    gibbs_populations,
    reeb_wolf_lower_bound,
    relative_entropy,
    shannon_entropy,
    trace_distance,
)


class TestPopulationState:
    def test_normalizes_small_drift(self):
        state = PopulationState([0.5, 0.5 + 5e-13])
        assert state.probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_rejects_large_drift(self):
        with pytest.raises(ValueError, match="sum"):
            PopulationState([0.6, 0.5])

    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError, match="negative"):
            PopulationState([1.1, -0.1])

    def test_immutable(self):
        state = PopulationState([0.25, 0.75])
        with pytest.raises(ValueError):
            state.probs[0] = 0.5

    def test_mean_number(self):
        assert PopulationState([0.25, 0.25, 0.25, 0.25]).mean_number() == 1.5


class TestGibbsPopulations:
    def test_infinite_temperature_is_uniform(self):
        state = gibbs_populations(GibbsSpec(0.0, 1.0, 4))
        np.testing.assert_allclose(state.probs, 0.25, atol=1e-15)

    def test_ln2_qubit_weights(self):
        state = gibbs_populations(GibbsSpec(math.log(2), 1.0, 2))
        np.testing.assert_allclose(state.probs, [2 / 3, 1 / 3], atol=1e-15)

    def test_ground_state_limit(self):
        state = gibbs_populations(GibbsSpec(50.0, 1.0, 3))
        assert state.probs[0] == pytest.approx(1.0, abs=1e-20)
        assert state.probs[1] == pytest.approx(math.exp(-50), rel=1e-12)
        assert state.probs[2] == pytest.approx(math.exp(-100), rel=1e-12)

    def test_extreme_exponents_stay_finite(self):
        state = gibbs_populations(GibbsSpec(1e6, 1.0, 5))
        assert np.isfinite(state.probs).all()
        assert state.probs[0] == 1.0

    def test_monotone_non_increasing(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            beta_omega = rng.uniform(0.0, 5.0)
            d = int(rng.integers(2, 12))
            probs = gibbs_populations(GibbsSpec(beta_omega, 1.0, d)).probs
            assert (np.diff(probs) <= 1e-15).all()

    def test_entropy_grows_with_dimension(self):
        entropies = [
            shannon_entropy(gibbs_populations(GibbsSpec(1.0, 1.0, d)))
            for d in range(2, 30)
        ]
        assert (np.diff(entropies) > 0).all()

    def test_invalid_spec(self):
        with pytest.raises(ValueError):
            GibbsSpec(-1.0, 1.0, 2)
        with pytest.raises(ValueError):
            GibbsSpec(1.0, 0.0, 2)
        with pytest.raises(ValueError):
            GibbsSpec(1.0, 1.0, 1)


class TestShannonEntropy:
    def test_pure_state(self):
        assert shannon_entropy(PopulationState([1.0, 0.0])) == 0.0

    def test_uniform_qubit(self):
        assert shannon_entropy(PopulationState([0.5, 0.5])) == pytest.approx(
            math.log(2), abs=1e-15
        )

    def test_large_dimension_gibbs_limit(self):
        # at beta*omega = 1 the infinite-ladder entropy is
        # 1/(e - 1) + ln(e / (e - 1)); d = 200 is already converged
        state = gibbs_populations(GibbsSpec(1.0, 1.0, 200))
        limit = 1 / (math.e - 1) + math.log(math.e / (math.e - 1))
        assert shannon_entropy(state) == pytest.approx(limit, abs=1e-6)

    def test_bounded_by_log_dimension(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            d = int(rng.integers(2, 15))
            p = rng.random(d)
            state = PopulationState(p / p.sum())
            s = shannon_entropy(state)
            assert -1e-12 <= s <= math.log(d) + 1e-12


class TestRelativeEntropy:
    def test_identical_states(self):
        p = PopulationState([0.3, 0.7])
        assert relative_entropy(p, p) == 0.0

    def test_pure_vs_uniform(self):
        value = relative_entropy(
            PopulationState([1.0, 0.0]), PopulationState([0.5, 0.5])
        )
        assert value == pytest.approx(math.log(2), abs=1e-15)

    def test_direct_arithmetic(self):
        value = relative_entropy(
            PopulationState([0.5, 0.5]), PopulationState([2 / 3, 1 / 3])
        )
        oracle = 0.5 * math.log(0.5 / (2 / 3)) + 0.5 * math.log(0.5 / (1 / 3))
        assert oracle == pytest.approx(math.log(9 / 8) / 2, abs=1e-15)
        assert value == pytest.approx(oracle, abs=1e-14)

    def test_support_violation_is_infinite(self):
        value = relative_entropy(
            PopulationState([0.5, 0.5]), PopulationState([1.0, 0.0])
        )
        assert value == math.inf

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            relative_entropy(PopulationState([1.0]), PopulationState([0.5, 0.5]))

    def test_klein_inequality_seeded(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            d = int(rng.integers(2, 9))
            p = rng.random(d)
            q = rng.random(d)
            sp = PopulationState(p / p.sum())
            sq = PopulationState(q / q.sum())
            value = relative_entropy(sp, sq)
            assert value >= 0.0
            if trace_distance(sp, sq) > 1e-10:
                assert value > 0.0
            else:
                assert value == pytest.approx(0.0, abs=1e-10)


class TestTraceDistance:
    def test_identical(self):
        p = PopulationState([0.2, 0.8])
        assert trace_distance(p, p) == 0.0

    def test_orthogonal(self):
        assert trace_distance(PopulationState([1, 0]), PopulationState([0, 1])) == 1.0

    def test_arithmetic(self):
        assert trace_distance(
            PopulationState([0.7, 0.3]), PopulationState([0.5, 0.5])
        ) == pytest.approx(0.2, abs=1e-15)

    def test_range(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            d = int(rng.integers(2, 10))
            p = rng.random(d)
            q = rng.random(d)
            value = trace_distance(
                PopulationState(p / p.sum()), PopulationState(q / q.sum())
            )
            assert 0.0 <= value <= 1.0


class TestDimensionBound:
    def test_zero_entropy_change(self):
        assert reeb_wolf_lower_bound(0.0, 7) == 0.0

    def test_ln2_qubit(self):
        assert reeb_wolf_lower_bound(math.log(2), 2) == pytest.approx(1 / 3, abs=1e-15)

    def test_invalid_dimension(self):
        with pytest.raises(ValueError):
            reeb_wolf_lower_bound(1.0, 1)

    @pytest.mark.parametrize("dim", range(2, 9))
    def test_lower_bounds_relative_entropy(self, dim):
        rng = np.random.default_rng(1000 + dim)
        for _ in range(1000):
            p = rng.random(dim)
            q = rng.random(dim)
            sp = PopulationState(p / p.sum())
            sq = PopulationState(q / q.sum())
            delta = shannon_entropy(sq) - shannon_entropy(sp)
            assert relative_entropy(sp, sq) >= reeb_wolf_lower_bound(delta, dim) - 1e-14
