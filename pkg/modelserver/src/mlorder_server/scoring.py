"""Word-level scoring on top of the token backends.

The wire protocol speaks whole words; this layer owns the subword
decomposition. Each unfilled word slot is rendered as one mask token per
true subword (word length in subwords is deliberately revealed). A target
word's subwords are scored left to right, revealing already-scored subwords
and re-evaluating the model at each step, which yields a proper joint
log-probability of the word.
"""
from __future__ import annotations

import math

from .backends import CausalBackend, MaskedBackend


class IndexViolation(Exception):
    """filled/targets indices out of range or overlapping (HTTP 400)."""


def _validate(words: list[str], filled: list[int], targets: list[int]):
    if not words:
        raise IndexViolation("words must be non-empty")
    n = len(words)
    for label, idxs in (("filled", filled), ("targets", targets)):
        for i in idxs:
            if not 0 <= i < n:
                raise IndexViolation(f"{label} index {i} out of range for {n} words")
    if set(filled) & set(targets):
        raise IndexViolation("targets and filled overlap")
    if not targets:
        raise IndexViolation("targets must be non-empty")


def score_masked(backend: MaskedBackend, words: list[str], filled: list[int],
                 targets: list[int]) -> dict[int, float]:
    """ln P(true word at each target | filled words present, others masked)."""
    _validate(words, filled, targets)
    filled_set = set(filled)
    word_ids = [backend.encode_word(w, i == 0) for i, w in enumerate(words)]
    offsets = []
    pos = 0
    for ids in word_ids:
        offsets.append(pos)
        pos += len(ids)

    def render(reveal: dict[int, int]) -> list[int]:
        # reveal[i] = number of word i's leading subwords to show (unfilled slots).
        body: list[int] = []
        for i, ids in enumerate(word_ids):
            if i in filled_set:
                body.extend(ids)
            else:
                shown = reveal.get(i, 0)
                body.extend(ids[:shown])
                body.extend([backend.mask_token_id] * (len(ids) - shown))
        return body

    out: dict[int, float] = {}
    for k in targets:
        total = 0.0
        for j in range(len(word_ids[k])):
            body = render({k: j})
            full, base = backend.wrap_sequence(body)
            rows = backend.token_logprobs(full)
            total += float(rows[base + offsets[k] + j][word_ids[k][j]])
        out[k] = total
    return out


def score_causal(backend: CausalBackend, words: list[str]) -> list[float]:
    """Per-word ln P(word k | words 0..k-1); entry 0 conditions on BOS."""
    if not words:
        raise IndexViolation("words must be non-empty")
    word_ids = [backend.encode_word(w, i == 0) for i, w in enumerate(words)]
    bos = backend.bos_ids()
    ids = list(bos)
    spans = []
    for tok in word_ids:
        spans.append((len(ids), len(ids) + len(tok)))
        ids.extend(tok)
    rows = backend.next_token_logprobs(ids)
    out = []
    for start, end in spans:
        if start == 0:
            # No BOS available: the first subword is unconditioned; treat its
            # contribution as certain.
            lp = math.fsum(float(rows[t - 1][ids[t]]) for t in range(start + 1, end))
        else:
            lp = math.fsum(float(rows[t - 1][ids[t]]) for t in range(start, end))
        out.append(lp)
    return out
