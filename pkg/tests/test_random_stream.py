"""Tests for the per-agent random streams."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.models.mechanism import RngSpec
from src.utils.random_stream import (
    PCG32,
    agent_stream,
    derive_agent_seed,
    derive_trial_seed,
    splitmix64,
)


# =========================================================================
# PCG32
# =========================================================================

class TestPCG32:
    def test_matches_reference_output(self):
        # pcg32_srandom(42, 54) from the PCG reference implementation
        rng = PCG32(seed=42, stream=54)
        assert [rng.next_u32() for _ in range(6)] == [
            0xA15C02B7, 0x7B47F409, 0xBA1D3330, 0x83D2F293, 0xBFA4784B, 0xCBED606E,
        ]

    def test_same_seed_same_sequence(self):
        a, b = PCG32(7, 3), PCG32(7, 3)
        assert [a.next_u32() for _ in range(50)] == [b.next_u32() for _ in range(50)]

    def test_streams_differ(self):
        a, b = PCG32(7, 3), PCG32(7, 4)
        assert [a.next_u32() for _ in range(10)] != [b.next_u32() for _ in range(10)]

    @given(seed=st.integers(0, 2**64 - 1), bound=st.integers(1, 2**32))
    @settings(max_examples=200)
    def test_bounded_in_range(self, seed, bound):
        rng = PCG32(seed)
        for _ in range(5):
            assert 0 <= rng.next_bounded(bound) < bound

    @pytest.mark.parametrize("bound", [0, -1, 2**32 + 1])
    def test_bad_bound(self, bound):
        with pytest.raises(ValueError):
            PCG32(1).next_bounded(bound)

    def test_bounded_is_roughly_uniform(self):
        rng = PCG32(2024)
        counts = [0] * 6
        for _ in range(60_000):
            counts[rng.next_bounded(6)] += 1
        # 4 sigma of a binomial(60000, 1/6)
        assert all(abs(c - 10_000) < 4 * 91.3 for c in counts)

    def test_random_float_unit_interval(self):
        rng = PCG32(5)
        values = [rng.random_float() for _ in range(1000)]
        assert all(0.0 <= v < 1.0 for v in values)

    def test_sample_distinct(self):
        rng = PCG32(11)
        picks = rng.sample(range(20), 20)
        assert sorted(picks) == list(range(20))
        with pytest.raises(ValueError):
            rng.sample(range(3), 4)


# =========================================================================
# SEED DERIVATION
# =========================================================================

class TestSeedDerivation:
    def test_splitmix_is_64_bit(self):
        for value in (0, 1, 2**63, 2**64 - 1):
            assert 0 <= splitmix64(value) < 2**64

    def test_trial_seed_deterministic(self):
        assert derive_trial_seed(99, 4) == derive_trial_seed(99, 4)
        assert derive_trial_seed(99, 4) != derive_trial_seed(99, 5)
        assert derive_trial_seed(99, 4) != derive_trial_seed(100, 4)

    def test_agent_seeds_distinct(self):
        trial_seed = derive_trial_seed(1, 0)
        seeds = {derive_agent_seed(trial_seed, a) for a in range(1000)}
        assert len(seeds) == 1000

    def test_agent_stream_independent_of_evaluation_order(self):
        trial_seed = derive_trial_seed(3, 2)
        forward = [agent_stream(trial_seed, a).next_u32() for a in range(10)]
        backward = [agent_stream(trial_seed, a).next_u32() for a in reversed(range(10))]
        assert forward == list(reversed(backward))

    def test_rng_spec_streams(self):
        rng = RngSpec(master_seed=5, trial_index=1)
        assert rng.stream(3).next_u32() == agent_stream(rng.trial_seed(), 3).next_u32()
        assert rng.for_trial(2).trial_index == 2

    def test_rng_spec_rejects_out_of_range_seed(self):
        with pytest.raises(ValueError):
            RngSpec(master_seed=2**64)
        with pytest.raises(ValueError):
            RngSpec(master_seed=-1)
