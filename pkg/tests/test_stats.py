import math
import random

import numpy as np
import pytest

from mlorder.core import AnalysisRecord, OrderPermutation, SentenceType, Structure
from mlorder.errors import ContractViolationError, EmptyInputError, UndefinedRatioError
from mlorder.stats import (
    aggregate_by_structure,
    histogram,
    ratio_db,
    rho_vs_causal,
    spearman_rho,
)


class TestSpearman:
    def test_identity(self):
        assert spearman_rho([0, 1, 2, 3], [0, 1, 2, 3]) == 1.0

    def test_reversal(self):
        assert spearman_rho([0, 1, 2, 3], [3, 2, 1, 0]) == -1.0

    def test_adjacent_swap(self):
        assert spearman_rho([0, 1, 2], [1, 0, 2]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(ContractViolationError):
            spearman_rho([0, 1], [0, 1, 2])

    def test_non_permutation(self):
        with pytest.raises(ContractViolationError):
            spearman_rho([0, 0, 1], [0, 1, 2])

    def test_symmetry_and_bounds(self):
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(2, 12)
            a = list(range(n))
            b = list(range(n))
            rng.shuffle(a)
            rng.shuffle(b)
            rho = spearman_rho(a, b)
            assert rho == spearman_rho(b, a)
            assert -1.0 - 1e-12 <= rho <= 1.0 + 1e-12

    def test_matches_rank_pearson(self):
        rng = random.Random(99)
        for _ in range(1000):
            n = rng.randint(2, 10)
            a = list(range(n))
            rng.shuffle(a)
            rho = spearman_rho(a, list(range(n)))
            pearson = np.corrcoef(a, range(n))[0, 1]
            assert rho == pytest.approx(pearson, abs=1e-9)


class TestRhoVsCausal:
    def test_identity(self):
        assert rho_vs_causal(OrderPermutation((0, 1, 2, 3))) == 1.0

    @pytest.mark.parametrize("n", range(2, 11))
    def test_reversal(self, n):
        assert rho_vs_causal(OrderPermutation(tuple(reversed(range(n))))) == -1.0

    def test_adjacent_swap(self):
        assert rho_vs_causal(OrderPermutation((1, 0, 2))) == 0.5


class TestRatioDb:
    def test_one_decade(self):
        assert ratio_db(math.log(1e-9), math.log(1e-10)) == pytest.approx(10.0, abs=1e-9)

    def test_equal_inputs_zero(self):
        assert ratio_db(-12.345, -12.345) == 0.0

    def test_published_svo_row(self):
        # 1.596e-9 over 2.428e-10 is about 8.18 dB.
        db = ratio_db(math.log(1.596e-9), math.log(2.428e-10))
        assert db == pytest.approx(8.177, abs=5e-3)

    def test_antisymmetry(self):
        rng = random.Random(2)
        for _ in range(100):
            a, b = rng.uniform(-60, -1), rng.uniform(-60, -1)
            assert ratio_db(a, b) == pytest.approx(-ratio_db(b, a), abs=1e-12)

    def test_neg_inf_rejected(self):
        with pytest.raises(UndefinedRatioError):
            ratio_db(float("-inf"), -1.0)


def record(prob_opt, prob_causal, rho=0.0, structure=Structure.SVO,
           stype=SentenceType.DECLARATIVE, sid="r"):
    logp_opt = math.log(prob_opt)
    logp_causal = math.log(prob_causal)
    return AnalysisRecord(
        sentence_id=sid,
        triplet_id="t",
        sentence_type=stype,
        structure=structure,
        n_words=3,
        optimal_order=OrderPermutation((0, 1, 2)),
        logp_optimal_noncausal=logp_opt,
        logp_causal=logp_causal,
        rho=rho,
        ratio_db=ratio_db(logp_opt, logp_causal),
    )


class TestAggregate:
    def test_two_point_mean(self):
        aggs = aggregate_by_structure([
            record(2e-10, 1e-10, sid="a"),
            record(4e-10, 3e-10, sid="b"),
        ])
        assert len(aggs) == 1
        agg = aggs[0]
        assert agg.count == 2
        assert agg.mean_linear_prob_optimal_noncausal == pytest.approx(3e-10, rel=1e-12)
        assert agg.mean_linear_prob_causal == pytest.approx(2e-10, rel=1e-12)

    def test_single_record(self):
        aggs = aggregate_by_structure([record(5e-12, 1e-13, rho=0.5)])
        assert aggs[0].mean_linear_prob_optimal_noncausal == pytest.approx(5e-12, rel=1e-12)
        assert aggs[0].mean_rho == 0.5

    def test_groups_by_structure_and_type(self):
        aggs = aggregate_by_structure([
            record(1e-10, 1e-11, structure=Structure.SVO, sid="a"),
            record(1e-10, 1e-11, structure=Structure.OSV, sid="b"),
            record(1e-10, 1e-11, stype=SentenceType.INTERROGATIVE, sid="c"),
        ])
        keys = [(a.structure, a.sentence_type) for a in aggs]
        assert len(keys) == 3
        assert len(set(keys)) == 3

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            aggregate_by_structure([])


class TestHistogram:
    def test_edge_closure(self):
        hist = histogram([-1.0, 0.0, 1.0], bins=2, value_range=(-1.0, 1.0))
        assert hist.counts == (1, 2)
        assert hist.total == 3

    def test_single_value_single_bin(self):
        hist = histogram([0.7], bins=1)
        assert hist.counts == (1,)
        assert hist.edges[0] < 0.7 < hist.edges[-1]

    def test_uniform_grid(self):
        values = [-1.0 + 2.0 * (i + 0.5) / 1000 for i in range(1000)]
        hist = histogram(values, bins=20, value_range=(-1.0, 1.0))
        assert hist.total == 1000
        assert all(c == 50 for c in hist.counts)

    def test_conservation(self):
        rng = random.Random(4)
        values = [rng.uniform(-2, 2) for _ in range(333)]
        hist = histogram(values, bins=7, value_range=(-1.0, 1.0))
        assert hist.total == 333
        assert sum(hist.counts) == 333

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            histogram([], bins=2)
