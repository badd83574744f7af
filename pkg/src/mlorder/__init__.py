"""Maximum-likelihood word generation order for non-causal language models."""

from .causal import causal_sequence_logprob
from .core import (
    NEG_INF,
    AnalysisRecord,
    LogProb,
    OrderPermutation,
    Sentence,
    SentenceType,
    Structure,
    SubsetState,
    order_to_ranks,
)
from .corpus import CorpusFile, load_corpus, segment_words
from .lattice import (
    ViterbiResult,
    brute_force_optimal_order,
    lattice_counts,
    order_logprob,
    viterbi_optimal_order,
)
from .scorer import (
    CachingScorer,
    CausalScoreRequest,
    MaskedScoreRequest,
    NeighborScorer,
    RemoteScorer,
    RemoteScorerConfig,
    Scorer,
    TableScorer,
    UniformScorer,
    build_scorer,
    random_table_scorer,
    with_cache,
)
from .stats import (
    Histogram,
    StructureAggregate,
    aggregate_by_structure,
    histogram,
    ratio_db,
    rho_vs_causal,
    spearman_rho,
)

__version__ = "0.1.0"
