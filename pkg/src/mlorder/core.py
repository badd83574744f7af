"""Domain types shared by every module: sentences, subset states, orders.

Log-probabilities are plain floats in the natural-log domain. A scorer that
reports zero probability yields NEG_INF; any path containing it loses every
comparison against a finite path. NaN is never a legal value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidPermutationError

NEG_INF = float("-inf")

LogProb = float


class SentenceType(str, Enum):
    DECLARATIVE = "declarative"
    INTERROGATIVE = "interrogative"


class Structure(str, Enum):
    SVO = "SVO"
    SOV = "SOV"
    VSO = "VSO"
    VOS = "VOS"
    OSV = "OSV"
    OVS = "OVS"


@dataclass(frozen=True)
class Sentence:
    """One labeled corpus sentence; ``words`` is the ordering unit."""

    id: str
    text: str
    words: tuple[str, ...]
    sentence_type: SentenceType
    structure: Structure
    triplet_id: str

    def __post_init__(self):
        if len(self.words) < 2:
            raise ValueError(f"sentence {self.id!r}: need at least 2 words")
        if any(not w for w in self.words):
            raise ValueError(f"sentence {self.id!r}: empty word unit")

    @property
    def n(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class SubsetState:
    """Set of already-filled word positions, stored as a bitmask.

    The masked index set is the complement of ``filled`` within 0..n-1.
    """

    n: int
    filled: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.filled < 0 or self.filled >> self.n:
            raise ValueError(f"filled mask {self.filled:#x} out of range for n={self.n}")

    def contains(self, pos: int) -> bool:
        return bool(self.filled >> pos & 1)

    def with_filled(self, pos: int) -> "SubsetState":
        if self.contains(pos):
            raise ValueError(f"position {pos} already filled")
        return SubsetState(self.n, self.filled | 1 << pos)

    def filled_positions(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.n) if self.contains(p))

    def masked_positions(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.n) if not self.contains(p))

    @property
    def num_filled(self) -> int:
        return self.filled.bit_count()


@dataclass(frozen=True)
class OrderPermutation:
    """A generation order: order[j] is the position filled at step j."""

    order: tuple[int, ...]
    rank: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(n)):
            raise InvalidPermutationError(f"not a permutation of 0..{n - 1}: {self.order}")
        rank = [0] * n
        for step, pos in enumerate(self.order):
            rank[pos] = step
        object.__setattr__(self, "rank", tuple(rank))

    @property
    def n(self) -> int:
        return len(self.order)

    @classmethod
    def identity(cls, n: int) -> "OrderPermutation":
        return cls(tuple(range(n)))

    def is_identity(self) -> bool:
        return self.order == tuple(range(self.n))


def order_to_ranks(order: OrderPermutation) -> list[int]:
    """Rank vector r with r[p] = step at which position p is generated."""
    return list(order.rank)


@dataclass(frozen=True)
class AnalysisRecord:
    """Per-sentence analysis row: optimal order vs. causal baseline."""

    sentence_id: str
    triplet_id: str
    sentence_type: SentenceType
    structure: Structure
    n_words: int
    optimal_order: OrderPermutation
    logp_optimal_noncausal: LogProb
    logp_causal: LogProb
    rho: float
    ratio_db: float

    def __post_init__(self):
        if math.isnan(self.rho) or not -1.0 - 1e-12 <= self.rho <= 1.0 + 1e-12:
            raise ValueError(f"rho out of [-1, 1]: {self.rho}")
