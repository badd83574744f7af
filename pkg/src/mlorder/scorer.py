"""Scorer contract plus reference implementations and the remote client.

A scorer answers two questions in the natural-log domain:
  * masked: ln P(true word at k | filled words present, all others masked)
  * causal: ln P(word k | words 0..k-1), one entry per position

Reference scorers (uniform, neighbor, table) are deterministic cost stubs
used by tests and the self-check; they need not normalize over a vocabulary.
The remote scorer talks JSON over HTTP to a model-serving sidecar.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import requests

from .core import LogProb, Sentence, SubsetState
from .errors import (
    ContractViolationError,
    MissingTableEntryError,
    ScorerProtocolError,
    ScorerTransportError,
)


@dataclass(frozen=True)
class MaskedScoreRequest:
    sentence: Sentence
    state: SubsetState
    targets: frozenset[int]

    def __post_init__(self):
        if not self.targets:
            raise ContractViolationError("targets must be non-empty")
        for k in self.targets:
            if not 0 <= k < self.state.n:
                raise ContractViolationError(f"target {k} out of range for n={self.state.n}")
            if self.state.contains(k):
                raise ContractViolationError(f"target {k} is already filled")
        if self.state.n != self.sentence.n:
            raise ContractViolationError("state width does not match sentence length")


@dataclass(frozen=True)
class CausalScoreRequest:
    sentence: Sentence


class Scorer:
    """Interface; concrete scorers override both methods."""

    def score_state(self, req: MaskedScoreRequest) -> dict[int, LogProb]:
        raise NotImplementedError

    def score_causal(self, req: CausalScoreRequest) -> list[LogProb]:
        raise NotImplementedError


class UniformScorer(Scorer):
    """Context-free scorer: every answer is ln p."""

    def __init__(self, p: float):
        if not 0.0 < p <= 1.0:
            raise ValueError(f"uniform p must be in (0, 1]: {p}")
        self.p = p
        self._logp = math.log(p)

    def score_state(self, req):
        return {k: self._logp for k in req.targets}

    def score_causal(self, req):
        return [self._logp] * req.sentence.n


class NeighborScorer(Scorer):
    """Test fixture: P(fill k | filled F) = (1 + |{k-1, k+1} & F|) / 4.

    Causal scoring applies the same rule to prefix-filled states.
    """

    @staticmethod
    def _prob(state: SubsetState, k: int) -> float:
        adjacent = sum(
            1 for j in (k - 1, k + 1) if 0 <= j < state.n and state.contains(j)
        )
        return (1 + adjacent) / 4.0

    def score_state(self, req):
        return {k: math.log(self._prob(req.state, k)) for k in req.targets}

    def score_causal(self, req):
        n = req.sentence.n
        out = []
        for k in range(n):
            prefix = SubsetState(n, (1 << k) - 1)
            out.append(math.log(self._prob(prefix, k)))
        return out


class TableScorer(Scorer):
    """Explicit (filled set, target) -> probability lookup.

    Missing entries raise MissingTableEntryError; fixtures must be total.
    """

    def __init__(self, masked: dict[tuple[tuple[int, ...], int], float],
                 causal: dict[int, float] | None = None):
        self.masked = dict(masked)
        self.causal = dict(causal or {})

    def score_state(self, req):
        filled = req.state.filled_positions()
        out = {}
        for k in req.targets:
            try:
                p = self.masked[(filled, k)]
            except KeyError:
                raise MissingTableEntryError(
                    f"no entry for filled={list(filled)} target={k}"
                ) from None
            out[k] = math.log(p) if p > 0.0 else float("-inf")
        return out

    def score_causal(self, req):
        out = []
        for k in range(req.sentence.n):
            try:
                p = self.causal[k]
            except KeyError:
                raise MissingTableEntryError(f"no causal entry for target={k}") from None
            out.append(math.log(p) if p > 0.0 else float("-inf"))
        return out

    @classmethod
    def from_file(cls, path) -> "TableScorer":
        """Parse the fixture format: one record per line.

        ``masked:<comma-list of filled positions or "none">,target:<k>,p:<decimal>``
        ``causal,target:<k>,p:<decimal>``
        ``#`` starts a comment.
        """
        masked: dict[tuple[tuple[int, ...], int], float] = {}
        causal: dict[int, float] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                try:
                    if line.startswith("masked:"):
                        spec = line[len("masked:"):]
                        filled_part, rest = spec.split(",target:", 1)
                        k_part, p_part = rest.split(",p:", 1)
                        if filled_part == "none":
                            filled: tuple[int, ...] = ()
                        else:
                            filled = tuple(sorted(int(x) for x in filled_part.split(",")))
                        masked[(filled, int(k_part))] = float(p_part)
                    elif line.startswith("causal"):
                        _, rest = line.split("target:", 1)
                        k_part, p_part = rest.split(",p:", 1)
                        causal[int(k_part)] = float(p_part)
                    else:
                        raise ValueError("unrecognized record")
                except (ValueError, IndexError) as exc:
                    raise ScorerProtocolError(
                        f"{path}: line {lineno}: malformed table record: {raw.strip()!r}"
                    ) from exc
        return cls(masked, causal)


class CachingScorer(Scorer):
    """Memoizes per (sentence id, filled bitmask) and per causal sentence.

    On a masked cache miss the full unfilled target set is requested so one
    backend call serves every later query against the same state. Safe under
    concurrent mixed read/write.
    """

    def __init__(self, inner: Scorer):
        self.inner = inner
        self._masked: dict[tuple[str, int], dict[int, LogProb]] = {}
        self._causal: dict[str, list[LogProb]] = {}
        self._lock = threading.Lock()
        self.backend_masked_calls = 0
        self.backend_causal_calls = 0

    def score_state(self, req):
        key = (req.sentence.id, req.state.filled)
        with self._lock:
            cached = self._masked.get(key)
        if cached is None or any(k not in cached for k in req.targets):
            full = MaskedScoreRequest(
                req.sentence, req.state, frozenset(req.state.masked_positions())
            )
            result = self.inner.score_state(full)
            with self._lock:
                self._masked[key] = result
                self.backend_masked_calls += 1
            cached = result
        return {k: cached[k] for k in req.targets}

    def score_causal(self, req):
        key = req.sentence.id
        with self._lock:
            cached = self._causal.get(key)
        if cached is None:
            cached = self.inner.score_causal(req)
            with self._lock:
                self._causal[key] = cached
                self.backend_causal_calls += 1
        return list(cached)


def with_cache(scorer: Scorer) -> CachingScorer:
    return CachingScorer(scorer)


@dataclass
class RemoteScorerConfig:
    endpoint: str
    batch_size: int = 16
    max_concurrent_requests: int = 4
    timeout: float = 60.0
    retries: int = 2

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.max_concurrent_requests < 1:
            raise ValueError("max_concurrent_requests must be >= 1")


class RemoteScorer(Scorer):
    """HTTP client for the model-serving sidecar.

    POST /v1/score/masked  {"words", "filled", "targets"} -> {"logprobs": {k: lp}}
    POST /v1/score/causal  {"words"} -> {"logprobs": [lp per word]}
    """

    def __init__(self, config: RemoteScorerConfig):
        self.config = config
        self._session = requests.Session()
        self._sem = threading.Semaphore(config.max_concurrent_requests)

    def _post(self, path: str, body: dict) -> dict:
        url = self.config.endpoint.rstrip("/") + path
        last_exc = None
        for _ in range(self.config.retries + 1):
            try:
                with self._sem:
                    resp = self._session.post(url, json=body, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = ScorerTransportError(f"{url}: HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise ScorerProtocolError(f"{url}: HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ScorerProtocolError(f"{url}: non-JSON response") from exc
        raise ScorerTransportError(f"{url}: transport failure: {last_exc}")

    def score_state(self, req):
        body = {
            "words": list(req.sentence.words),
            "filled": list(req.state.filled_positions()),
            "targets": sorted(req.targets),
        }
        data = self._post("/v1/score/masked", body)
        try:
            logprobs = data["logprobs"]
            out = {int(k): float(v) for k, v in logprobs.items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ScorerProtocolError(f"malformed masked response: {data!r}") from exc
        missing = set(req.targets) - set(out)
        if missing:
            raise ScorerProtocolError(f"response missing targets {sorted(missing)}")
        return {k: out[k] for k in req.targets}

    def score_causal(self, req):
        data = self._post("/v1/score/causal", {"words": list(req.sentence.words)})
        try:
            out = [float(v) for v in data["logprobs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ScorerProtocolError(f"malformed causal response: {data!r}") from exc
        if len(out) != req.sentence.n:
            raise ScorerProtocolError(
                f"expected {req.sentence.n} causal entries, got {len(out)}"
            )
        return out


def random_table_scorer(n: int, rng) -> TableScorer:
    """Complete random table over the n-word lattice; used by the self-check.

    ``rng`` is a random.Random; probabilities are drawn in [0.05, 0.95] so
    every path stays finite.
    """
    from itertools import combinations

    masked: dict[tuple[tuple[int, ...], int], float] = {}
    for size in range(n):
        for filled in combinations(range(n), size):
            for k in range(n):
                if k not in filled:
                    masked[(filled, k)] = rng.uniform(0.05, 0.95)
    causal = {k: rng.uniform(0.05, 0.95) for k in range(n)}
    return TableScorer(masked, causal)


def build_scorer(spec: str) -> Scorer:
    """Build a scorer from a CLI spec string.

    Accepted forms: ``ref:uniform:<p>``, ``ref:neighbor``, ``table:<path>``,
    ``remote:<endpoint url>``.
    """
    if spec == "ref:neighbor":
        return NeighborScorer()
    if spec.startswith("ref:uniform:"):
        return UniformScorer(float(spec.split(":", 2)[2]))
    if spec.startswith("table:"):
        return TableScorer.from_file(spec.split(":", 1)[1])
    if spec.startswith("remote:"):
        return RemoteScorer(RemoteScorerConfig(endpoint=spec.split(":", 1)[1]))
    raise ValueError(f"unrecognized scorer spec: {spec!r}")
