"""Model backends: the low-level token interface the scoring layer consumes.

A masked backend scores tokens in place inside a (partially masked) sequence;
a causal backend scores each token given its prefix. Both return natural-log
probabilities. Transformer-based implementations live here; a deterministic
stub for protocol tests lives in stub.py.
"""
from __future__ import annotations

import numpy as np


class WordEncodingError(Exception):
    """A word the tokenizer cannot encode (maps to HTTP 422)."""


class MaskedBackend:
    """Fill-in-the-blank scoring over a fixed subword vocabulary."""

    mask_token_id: int

    def encode_word(self, word: str, is_first: bool) -> list[int]:
        """Subword ids for one word; is_first controls leading-space handling."""
        raise NotImplementedError

    def token_logprobs(self, input_ids: list[int]) -> np.ndarray:
        """[len(input_ids), vocab] log-softmax of the model at every position.

        input_ids must already include any special framing tokens the model
        expects; see wrap_sequence.
        """
        raise NotImplementedError

    def wrap_sequence(self, body_ids: list[int]) -> tuple[list[int], int]:
        """Add special framing tokens; returns (full ids, offset of body)."""
        return list(body_ids), 0


class CausalBackend:
    """Next-token scoring; sequences are implicitly prefixed with BOS."""

    def encode_word(self, word: str, is_first: bool) -> list[int]:
        raise NotImplementedError

    def bos_ids(self) -> list[int]:
        raise NotImplementedError

    def next_token_logprobs(self, input_ids: list[int]) -> np.ndarray:
        """[len(input_ids), vocab]; row i is the distribution of token i+1
        given input_ids[: i + 1]."""
        raise NotImplementedError


class HFMaskedBackend(MaskedBackend):
    """transformers AutoModelForMaskedLM wrapper (e.g. a RoBERTa checkpoint)."""

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self._torch = torch
        self.model_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id).to(device).eval()
        self.device = device
        self.mask_token_id = self.tokenizer.mask_token_id
        if self.mask_token_id is None:
            raise ValueError(f"{model_id} has no mask token")

    def encode_word(self, word, is_first):
        text = word if is_first else " " + word
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if not ids:
            raise WordEncodingError(f"tokenizer cannot encode {word!r}")
        return ids

    def wrap_sequence(self, body_ids):
        bos = self.tokenizer.bos_token_id
        eos = self.tokenizer.eos_token_id
        prefix = [bos] if bos is not None else []
        suffix = [eos] if eos is not None else []
        return prefix + list(body_ids) + suffix, len(prefix)

    def token_logprobs(self, input_ids):
        torch = self._torch
        with torch.no_grad():
            ids = torch.tensor([input_ids], device=self.device)
            logits = self.model(ids).logits[0]
            return torch.log_softmax(logits, dim=-1).cpu().double().numpy()


class HFCausalBackend(CausalBackend):
    """transformers AutoModelForCausalLM wrapper (e.g. a GPT-2 checkpoint)."""

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoModelForCausalLM, AutoTokenizer

        self._torch = torch
        self.model_id = model_id
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForCausalLM.from_pretrained(model_id).to(device).eval()
        self.device = device

    def encode_word(self, word, is_first):
        text = word if is_first else " " + word
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if not ids:
            raise WordEncodingError(f"tokenizer cannot encode {word!r}")
        return ids

    def bos_ids(self):
        bos = self.tokenizer.bos_token_id
        if bos is None:
            bos = self.tokenizer.eos_token_id
        return [bos] if bos is not None else []

    def next_token_logprobs(self, input_ids):
        torch = self._torch
        with torch.no_grad():
            ids = torch.tensor([input_ids], device=self.device)
            logits = self.model(ids).logits[0]
            return torch.log_softmax(logits, dim=-1).cpu().double().numpy()
