"""Exact maximum-likelihood generation-order search over the subset lattice.

The 2^N states are the subsets of filled word positions; a transition fills
one masked position and costs the log-probability of the true word there
given the current partial sentence. The optimal order is the best chain from
the empty state to the full state. A factorial brute-force oracle and an
arbitrary-order evaluator back the dynamic program in tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import LogProb, OrderPermutation, Sentence, SubsetState
from .errors import MlorderError, SizeLimitError
from .scorer import MaskedScoreRequest, Scorer

DEFAULT_CAP = 18
BRUTE_FORCE_CAP = 8


@dataclass(frozen=True)
class Transition:
    from_state: SubsetState
    position: int
    cost: LogProb

    def __post_init__(self):
        if self.from_state.contains(self.position):
            raise ValueError(f"position {self.position} already filled in source state")

    @property
    def to_state(self) -> SubsetState:
        return self.from_state.with_filled(self.position)


@dataclass(frozen=True)
class ViterbiResult:
    order: OrderPermutation
    logp: LogProb
    states_visited: int
    scorer_calls: int


def lattice_counts(n: int, cap: int = DEFAULT_CAP) -> tuple[int, int]:
    """(state count, transition count) = (2^n, n * 2^(n-1))."""
    if n < 1:
        raise ValueError(f"n must be >= 1: {n}")
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds cap {cap}")
    return 1 << n, n << (n - 1)


def _score_masked(scorer: Scorer, sentence: Sentence, state: SubsetState,
                  targets: frozenset[int]) -> dict[int, LogProb]:
    try:
        return scorer.score_state(MaskedScoreRequest(sentence, state, targets))
    except MlorderError as exc:
        if hasattr(exc, "add_note"):
            exc.add_note(f"while scoring state filled={list(state.filled_positions())}")
        raise


def viterbi_optimal_order(sentence: Sentence, scorer: Scorer,
                          cap: int = DEFAULT_CAP) -> ViterbiResult:
    """Exact argmax over all N! generation orders via subset DP.

    Every state with a masked slot is scored exactly once (all outgoing
    transitions from one model evaluation). Ties are resolved toward the
    lexicographically smallest optimal order, so identical inputs always
    return identical results.
    """
    n = sentence.n
    if n < 2:
        raise ValueError("need at least 2 words")
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds cap {cap}")

    full = (1 << n) - 1
    masks_by_popcount: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(full + 1):
        masks_by_popcount[mask.bit_count()].append(mask)

    # best[mask] = best cumulative cost from this state to the full state;
    # costs[mask] maps each masked position to its fill cost from this state.
    best: list[LogProb] = [0.0] * (full + 1)
    costs: list[dict[int, LogProb] | None] = [None] * (full + 1)
    scorer_calls = 0

    for popcount in range(n - 1, -1, -1):
        for mask in masks_by_popcount[popcount]:
            state = SubsetState(n, mask)
            targets = frozenset(state.masked_positions())
            state_costs = _score_masked(scorer, sentence, state, targets)
            scorer_calls += 1
            costs[mask] = state_costs
            best[mask] = max(
                state_costs[k] + best[mask | 1 << k] for k in targets
            )

    # Forward reconstruction; the first (smallest-k) maximizer at each state
    # yields the lexicographically smallest optimal order.
    order = []
    mask = 0
    while mask != full:
        state_costs = costs[mask]
        choice = None
        choice_value = None
        for k in sorted(state_costs):
            value = state_costs[k] + best[mask | 1 << k]
            if choice is None or value > choice_value:
                choice, choice_value = k, value
        order.append(choice)
        mask |= 1 << choice

    return ViterbiResult(
        order=OrderPermutation(tuple(order)),
        logp=best[0],
        states_visited=full + 1,
        scorer_calls=scorer_calls,
    )


def order_logprob(sentence: Sentence, order: OrderPermutation, scorer: Scorer,
                  cap: int = DEFAULT_CAP) -> LogProb:
    """Log-probability of generating the sentence in the given order."""
    n = sentence.n
    if order.n != n:
        raise ValueError(f"order length {order.n} != sentence length {n}")
    if n > cap:
        raise SizeLimitError(f"n={n} exceeds cap {cap}")
    total = 0.0
    state = SubsetState(n)
    for pos in order.order:
        total += _score_masked(scorer, sentence, state, frozenset([pos]))[pos]
        state = state.with_filled(pos)
    return total


def brute_force_optimal_order(sentence: Sentence, scorer: Scorer) -> ViterbiResult:
    """Factorial-enumeration oracle; independent of the subset DP.

    Keeps the first maximum in lexicographic enumeration order, matching the
    DP's tie-break.
    """
    n = sentence.n
    if n > BRUTE_FORCE_CAP:
        raise SizeLimitError(f"n={n} exceeds brute-force cap {BRUTE_FORCE_CAP}")

    calls = 0

    class _Counting(Scorer):
        def score_state(self, req):
            nonlocal calls
            calls += 1
            return scorer.score_state(req)

        def score_causal(self, req):
            return scorer.score_causal(req)

    counting = _Counting()
    best_order = None
    best_logp = None
    for perm in itertools.permutations(range(n)):
        logp = order_logprob(sentence, OrderPermutation(perm), counting)
        if best_order is None or logp > best_logp:
            best_order, best_logp = perm, logp
    return ViterbiResult(
        order=OrderPermutation(best_order),
        logp=best_logp,
        states_visited=1 << n,
        scorer_calls=calls,
    )
