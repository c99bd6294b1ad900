import numpy as np
import pytest

from seqassign import make_distribution, oracle_agreement, oracle_value, remaining_value
from seqassign.errors import TooManySlotsError
from seqassign.oracle import MAX_SLOTS, build_subset_table


class TestOracleValue:
    def test_empty(self, dice):
        assert oracle_value(dice, []) == 0.0

    def test_single_slot(self, dice):
        assert oracle_value(dice, [3.0]) == pytest.approx(3.0 * 3.5, abs=1e-12)

    def test_dice_pair_hand_value(self, dice):
        # roll one die onto {1, 2}: high rolls take the 2, then the mean takes the rest
        assert oracle_value(dice, [1, 2]) == pytest.approx(11.25, abs=1e-12)

    def test_permutation_invariance(self, dice):
        rewards = [2.0, 7.0, 11.0, 13.0]
        base = oracle_value(dice, rewards)
        rng = np.random.default_rng(0)
        for _ in range(5):
            shuffled = list(rng.permutation(rewards))
            assert oracle_value(dice, shuffled) == pytest.approx(base, rel=1e-12)

    def test_subset_monotone_for_positive_rewards(self, dice):
        # with positive support and rewards, an extra slot never hurts
        table = build_subset_table(dice, [1.0, 2.0, 4.0])
        for mask in range(1, 8):
            low = mask & (mask - 1)
            assert table.value(low) <= table.value(mask) + 1e-12

    def test_slot_cap(self, dice):
        with pytest.raises(TooManySlotsError):
            oracle_value(dice, list(range(MAX_SLOTS + 1)))


class TestAgreement:
    def test_exact_on_dice(self, dice):
        ag = oracle_agreement(dice, [1, 2, 3, 4, 5])
        assert ag.rel_gap < 1e-12
        assert ag.oracle == pytest.approx(ag.engine, rel=1e-12)

    def test_agreement_cap(self, dice):
        with pytest.raises(TooManySlotsError):
            oracle_agreement(dice, list(range(1, 14)))

    def test_random_instances(self, random_dist):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = random_dist(rng, k=int(rng.integers(2, 7)))
            m = int(rng.integers(1, 9))
            rewards = np.cumsum(rng.uniform(0.1, 2.0, size=m))
            ag = oracle_agreement(d, rewards.tolist())
            assert ag.rel_gap < 1e-9

    def test_engine_matches_across_reward_shapes(self, dice):
        for rewards in ([1, 10, 100], [0.5, 0.6, 0.7, 0.8], [-3.0, -1.0, 2.0]):
            assert oracle_value(dice, rewards) == pytest.approx(
                remaining_value(dice, rewards), rel=1e-12, abs=1e-12
            )
