import math

import numpy as np
import pytest

from subsel import (
    ScoreTable,
    TokenProbRecord,
    UtilityParams,
    ValidationError,
    combined_utility,
    minmax_normalize,
    pairwise_utility,
    perplexity_from_probs,
    pmi_utility,
    utility_for_record,
)


class TestPerplexity:
    def test_certain_tokens(self):
        assert perplexity_from_probs([1.0, 1.0, 1.0]) == 1.0

    def test_uniform_eighth(self):
        assert perplexity_from_probs([1 / 8, 1 / 8]) == pytest.approx(8.0, abs=1e-12)

    def test_hand_value(self):
        # exp(-(ln 0.5 + ln 0.25) / 2) = sqrt(8)
        assert perplexity_from_probs([0.5, 0.25]) == pytest.approx(2.8284271247461903, abs=1e-15)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            perplexity_from_probs([])
        with pytest.raises(ValueError):
            perplexity_from_probs([0.0, 0.5])
        with pytest.raises(ValueError):
            perplexity_from_probs([0.5, 1.2])

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            probs = rng.uniform(0.01, 1.0, size=9)
            base = perplexity_from_probs(probs)
            shuffled = perplexity_from_probs(rng.permutation(probs))
            assert shuffled == pytest.approx(base, rel=1e-12)

    def test_at_least_one(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            probs = rng.uniform(0.001, 1.0, size=int(rng.integers(1, 12)))
            assert perplexity_from_probs(probs) >= 1.0


class TestMinMax:
    def test_hand_values(self):
        np.testing.assert_allclose(minmax_normalize([2, 4, 8]), [0.0, 1 / 3, 1.0], atol=1e-15)

    def test_degenerate_range(self):
        assert np.array_equal(minmax_normalize([5, 5, 5]), [0.0, 0.0, 0.0])

    def test_unit_range_identity(self):
        assert np.array_equal(minmax_normalize([0.0, 1.0]), [0.0, 1.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            minmax_normalize([1.0, np.inf])


class TestCombinedUtility:
    def _table(self):
        return ScoreTable([2.0, 4.0, 8.0], [0.5, 0.25, 1.0])

    def test_alpha_one_is_normalized_ppl(self):
        table = combined_utility(self._table(), UtilityParams(alpha=1.0))
        np.testing.assert_allclose(table.utility, [0.0, 1 / 3, 1.0], atol=1e-15)

    def test_alpha_zero_is_normalized_cot(self):
        table = combined_utility(self._table(), UtilityParams(alpha=0.0))
        np.testing.assert_allclose(table.utility, [1 / 3, 0.0, 1.0], atol=1e-15)

    def test_alpha_half_averages(self):
        table = combined_utility(self._table(), UtilityParams(alpha=0.5))
        np.testing.assert_allclose(table.utility, [1 / 6, 1 / 6, 1.0], atol=1e-15)

    def test_alpha_domain(self):
        with pytest.raises(ValidationError):
            UtilityParams(alpha=1.5)

    def test_output_in_unit_interval(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            n = int(rng.integers(1, 12))
            table = ScoreTable(1.0 + rng.uniform(0, 5, n), rng.uniform(0, 2, n))
            out = combined_utility(table, UtilityParams(alpha=float(rng.uniform(0, 1))))
            assert out.utility.min() >= 0.0 and out.utility.max() <= 1.0

    def test_monotone_in_own_ppl(self):
        # raising one example's perplexity never lowers its own utility (alpha > 0)
        rng = np.random.default_rng(8)
        for _ in range(30):
            n = int(rng.integers(2, 10))
            ppl = 1.0 + rng.uniform(0, 5, n)
            cot = rng.uniform(0, 2, n)
            alpha = float(rng.uniform(0.05, 1.0))
            i = int(rng.integers(0, n))
            before = combined_utility(ScoreTable(ppl, cot), UtilityParams(alpha=alpha)).utility[i]
            ppl_up = ppl.copy()
            ppl_up[i] += float(rng.uniform(0.1, 3.0))
            after = combined_utility(ScoreTable(ppl_up, cot), UtilityParams(alpha=alpha)).utility[i]
            assert after >= before - 1e-12


class TestPairwiseUtility:
    def test_identical_distributions(self):
        rec = TokenProbRecord(0, 1, [0.3, 0.6], [0.3, 0.6])
        assert pairwise_utility(rec) == 0.0

    def test_single_token_hand_value(self):
        rec = TokenProbRecord(0, 1, [0.5], [1.0])
        assert pairwise_utility(rec) == pytest.approx(0.5, abs=1e-15)

    def test_two_token_hand_value(self):
        rec = TokenProbRecord(0, 1, [0.6, 0.8], [0.9, 0.9])
        expected = (math.sqrt(0.16 + 0.04) - math.sqrt(0.01 + 0.01)) / math.sqrt(2.0)
        assert pairwise_utility(rec) == pytest.approx(expected, abs=1e-15)

    def test_unnormalized_variant(self):
        rec = TokenProbRecord(0, 1, [0.6, 0.8], [0.9, 0.9])
        expected = math.sqrt(0.16 + 0.04) - math.sqrt(0.01 + 0.01)
        assert pairwise_utility(rec, length_normalize=False) == pytest.approx(expected, abs=1e-15)

    def test_positive_when_cond_dominates(self):
        rng = np.random.default_rng(12)
        for _ in range(30):
            t = int(rng.integers(1, 8))
            base = rng.uniform(0.05, 0.9, size=t)
            lift = rng.uniform(0.0, 1.0 - base.max(), size=t)
            lift[int(rng.integers(0, t))] += 1e-6  # at least one strict improvement
            cond = np.minimum(base + lift, 1.0)
            rec = TokenProbRecord(0, 1, base, cond)
            assert pairwise_utility(rec) > 0.0

    def test_mode_guard(self):
        rec = TokenProbRecord(0, 1, [0.5], [0.5])
        with pytest.raises(ValueError):
            pairwise_utility(rec, UtilityParams(distance_mode="log-ratio"))


class TestPmiUtility:
    def test_identical_is_zero(self):
        rec = TokenProbRecord(0, 1, [0.3, 0.7], [0.3, 0.7])
        assert pmi_utility(rec) == 0.0

    def test_doubling_is_log_two(self):
        rec = TokenProbRecord(0, 1, [0.25], [0.5])
        assert pmi_utility(rec) == pytest.approx(math.log(2.0), abs=1e-15)

    def test_additive_over_splits(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            t = int(rng.integers(2, 10))
            base = rng.uniform(0.05, 1.0, size=t)
            cond = rng.uniform(0.05, 1.0, size=t)
            whole = pmi_utility(TokenProbRecord(0, 1, base, cond))
            cut = int(rng.integers(1, t))
            left = pmi_utility(TokenProbRecord(0, 1, base[:cut], cond[:cut]))
            right = pmi_utility(TokenProbRecord(0, 1, base[cut:], cond[cut:]))
            assert left + right == pytest.approx(whole, abs=1e-12)

    def test_sign_matches_probability_ratio(self):
        rng = np.random.default_rng(14)
        for _ in range(50):
            t = int(rng.integers(1, 6))
            base = rng.uniform(0.05, 1.0, size=t)
            cond = rng.uniform(0.05, 1.0, size=t)
            value = pmi_utility(TokenProbRecord(0, 1, base, cond))
            ratio = float(np.prod(cond) / np.prod(base))
            if ratio > 1.0 + 1e-12:
                assert value > 0.0
            elif ratio < 1.0 - 1e-12:
                assert value < 0.0

    def test_dispatch(self):
        rec = TokenProbRecord(0, 1, [0.25], [0.5])
        assert utility_for_record(rec, UtilityParams(distance_mode="log-ratio")) == pmi_utility(rec)
        assert utility_for_record(rec, UtilityParams()) == pairwise_utility(rec)
