"""Deterministic stub backends for protocol tests; no neural network.

Pseudo-logits are derived from CRC32 of the input sequence, so identical
requests always produce bitwise-identical responses, independent of process
hash seeds.
"""
from __future__ import annotations

import zlib

import numpy as np

from .backends import CausalBackend, MaskedBackend, WordEncodingError

VOCAB = 257
MASK_ID = 0
BOS_ID = 1


def _word_ids(word: str, is_first: bool) -> list[int]:
    if not word or not word.strip():
        raise WordEncodingError(f"cannot encode {word!r}")
    # Subword count varies with the word so multi-subword paths get exercised.
    count = 1 + len(word) % 3
    base = "" if is_first else " "
    return [
        2 + zlib.crc32(f"{base}{word}#{j}".encode()) % (VOCAB - 2)
        for j in range(count)
    ]


def _logprob_rows(input_ids: list[int]) -> np.ndarray:
    rows = []
    for pos in range(len(input_ids)):
        seed = zlib.crc32(bytes(str((tuple(input_ids), pos)), "utf-8"))
        rng = np.random.default_rng(seed)
        logits = rng.standard_normal(VOCAB)
        rows.append(logits - np.logaddexp.reduce(logits))
    return np.array(rows)


class StubMaskedBackend(MaskedBackend):
    mask_token_id = MASK_ID

    def encode_word(self, word, is_first):
        return _word_ids(word, is_first)

    def wrap_sequence(self, body_ids):
        return [BOS_ID] + list(body_ids) + [BOS_ID], 1

    def token_logprobs(self, input_ids):
        return _logprob_rows(input_ids)


class StubCausalBackend(CausalBackend):
    def encode_word(self, word, is_first):
        return _word_ids(word, is_first)

    def bos_ids(self):
        return [BOS_ID]

    def next_token_logprobs(self, input_ids):
        return _logprob_rows(input_ids)
