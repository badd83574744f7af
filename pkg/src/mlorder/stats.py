"""Rank correlation, probability-ratio metric, aggregation, histograms."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AnalysisRecord, LogProb, OrderPermutation, SentenceType, Structure, order_to_ranks
from .errors import ContractViolationError, EmptyInputError, UndefinedRatioError

_DB_PER_NAT = 10.0 / math.log(10.0)

_STRUCTURE_ORDER = {s: i for i, s in enumerate(Structure)}


def spearman_rho(a: list[int], b: list[int]) -> float:
    """Spearman's rho for two tie-free rank vectors (permutations of 0..N-1).

    rho = 1 - 6 * sum(d_i^2) / (N * (N^2 - 1))
    """
    n = len(a)
    if len(b) != n:
        raise ContractViolationError(f"length mismatch: {len(a)} vs {len(b)}")
    if n < 2:
        raise ContractViolationError("need at least 2 ranks")
    if sorted(a) != list(range(n)) or sorted(b) != list(range(n)):
        raise ContractViolationError("rank vectors must be permutations of 0..N-1")
    d2 = sum((x - y) ** 2 for x, y in zip(a, b))
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def rho_vs_causal(order: OrderPermutation) -> float:
    """rho of the order's ranks against the causal (identity) ranks."""
    ranks = order_to_ranks(order)
    return spearman_rho(ranks, list(range(order.n)))


def ratio_db(logp_optimal: LogProb, logp_causal: LogProb) -> float:
    """10 * log10(P_optimal / P_causal), computed in the log domain."""
    if math.isinf(logp_optimal) or math.isinf(logp_causal):
        raise UndefinedRatioError("ratio undefined for zero-probability operand")
    return _DB_PER_NAT * (logp_optimal - logp_causal)


@dataclass(frozen=True)
class StructureAggregate:
    structure: Structure
    sentence_type: SentenceType
    count: int
    mean_linear_prob_optimal_noncausal: float
    mean_linear_prob_causal: float
    mean_rho: float
    # Supplementary view: exp of the mean log-prob, robust to max-domination.
    geomean_prob_optimal_noncausal: float
    geomean_prob_causal: float


def aggregate_by_structure(records: list[AnalysisRecord]) -> list[StructureAggregate]:
    """One aggregate per (structure, sentence_type) present in the records.

    Linear-domain means use compensated summation of exp(logp); values span
    many orders of magnitude.
    """
    if not records:
        raise EmptyInputError("no records to aggregate")
    groups: dict[tuple[Structure, SentenceType], list[AnalysisRecord]] = {}
    for rec in records:
        groups.setdefault((rec.structure, rec.sentence_type), []).append(rec)

    out = []
    for (structure, stype), recs in sorted(
        groups.items(), key=lambda kv: (kv[0][1].value, _STRUCTURE_ORDER[kv[0][0]])
    ):
        count = len(recs)
        out.append(StructureAggregate(
            structure=structure,
            sentence_type=stype,
            count=count,
            mean_linear_prob_optimal_noncausal=(
                math.fsum(math.exp(r.logp_optimal_noncausal) for r in recs) / count
            ),
            mean_linear_prob_causal=(
                math.fsum(math.exp(r.logp_causal) for r in recs) / count
            ),
            mean_rho=math.fsum(r.rho for r in recs) / count,
            geomean_prob_optimal_noncausal=math.exp(
                math.fsum(r.logp_optimal_noncausal for r in recs) / count
            ),
            geomean_prob_causal=math.exp(
                math.fsum(r.logp_causal for r in recs) / count
            ),
        ))
    return out


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    total: int


def histogram(values: list[float], bins: int = 20,
              value_range: tuple[float, float] | None = None) -> Histogram:
    """Equal-width histogram; bins half-open [lo, hi) with the last closed."""
    if not values:
        raise EmptyInputError("no values to histogram")
    if bins < 1:
        raise ValueError(f"bins must be >= 1: {bins}")
    if value_range is None:
        lo, hi = min(values), max(values)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        value_range = (lo, hi)
    # Clip so every value lands in exactly one bin (conservation).
    clipped = np.clip(np.asarray(values, dtype=float), *value_range)
    counts, edges = np.histogram(clipped, bins=bins, range=value_range)
    return Histogram(
        edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        total=int(counts.sum()),
    )
