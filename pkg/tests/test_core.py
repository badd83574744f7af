import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlorder.core import OrderPermutation, SubsetState, order_to_ranks
from mlorder.errors import InvalidPermutationError

from conftest import make_sentence


class TestOrderToRanks:
    def test_identity(self):
        assert order_to_ranks(OrderPermutation((0, 1, 2))) == [0, 1, 2]

    def test_reversal_is_self_inverse(self):
        assert order_to_ranks(OrderPermutation((2, 1, 0))) == [2, 1, 0]

    def test_three_cycle(self):
        assert order_to_ranks(OrderPermutation((1, 2, 0))) == [2, 0, 1]

    def test_duplicate_rejected(self):
        with pytest.raises(InvalidPermutationError):
            OrderPermutation((0, 0, 2))

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidPermutationError):
            OrderPermutation((0, 1, 3))

    @given(st.permutations(list(range(7))))
    def test_double_inverse_roundtrip(self, perm):
        ranks = order_to_ranks(OrderPermutation(tuple(perm)))
        assert sorted(ranks) == list(range(len(perm)))
        back = order_to_ranks(OrderPermutation(tuple(ranks)))
        assert back == list(perm)


class TestLogProbArithmetic:
    @given(st.lists(st.floats(min_value=1e-30, max_value=1.0), min_size=1, max_size=6))
    def test_exp_of_sum_is_product(self, probs):
        logs = [math.log(p) for p in probs]
        product = math.prod(probs)
        assert math.exp(sum(logs)) == pytest.approx(product, rel=1e-12)


class TestSubsetState:
    def test_masked_is_complement(self):
        state = SubsetState(4, 0b0101)
        assert state.filled_positions() == (0, 2)
        assert state.masked_positions() == (1, 3)
        assert state.num_filled == 2

    def test_with_filled(self):
        state = SubsetState(3).with_filled(1)
        assert state.filled_positions() == (1,)
        with pytest.raises(ValueError):
            state.with_filled(1)

    def test_mask_width(self):
        with pytest.raises(ValueError):
            SubsetState(2, 0b100)


class TestSentence:
    def test_requires_two_words(self):
        with pytest.raises(ValueError):
            make_sentence(["solo"])

    def test_n(self, la_casa_azul):
        assert la_casa_azul.n == 3
