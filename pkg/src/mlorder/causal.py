"""Left-to-right sequence log-probability, the comparison baseline."""
from __future__ import annotations

from .core import LogProb, Sentence
from .scorer import CausalScoreRequest, Scorer


def causal_sequence_logprob(sentence: Sentence, causal_scorer: Scorer) -> LogProb:
    """Sum of per-position causal log-probs; no length normalization."""
    entries = causal_scorer.score_causal(CausalScoreRequest(sentence))
    return sum(entries)
