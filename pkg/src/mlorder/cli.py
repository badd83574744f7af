"""Command-line front end.

Exit codes: 0 success, 1 partial analysis failure or self-check mismatch,
2 usage error, 3 corpus/validation error, 4 scorer transport error,
5 size-limit breach.
"""
from __future__ import annotations

import csv
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import causal as causal_mod
from . import corpus as corpus_mod
from . import lattice, stats
from .core import AnalysisRecord, Sentence, SentenceType, Structure
from .errors import (
    CorpusParseError,
    CorpusValidationError,
    MlorderError,
    ScorerProtocolError,
    ScorerTransportError,
    SizeLimitError,
)
from .scorer import (
    CachingScorer,
    build_scorer,
    random_table_scorer,
)

EXIT_PARTIAL = 1
EXIT_VALIDATION = 3
EXIT_TRANSPORT = 4
EXIT_SIZE = 5

LOG10 = math.log(10.0)

ENV_MASKED = "MLORDER_MASKED_ENDPOINT"
ENV_CAUSAL = "MLORDER_CAUSAL_ENDPOINT"


def _resolve_scorer(flag_value, env_var):
    if flag_value:
        return build_scorer(flag_value)
    endpoint = os.environ.get(env_var)
    if endpoint:
        return build_scorer(f"remote:{endpoint}")
    raise click.UsageError(
        f"no scorer given: pass --scorer/--masked-scorer/--causal-scorer or set {env_var}"
    )


def _exit_for(exc: MlorderError) -> int:
    if isinstance(exc, SizeLimitError):
        return EXIT_SIZE
    if isinstance(exc, (ScorerTransportError, ScorerProtocolError)):
        return EXIT_TRANSPORT
    if isinstance(exc, (CorpusParseError, CorpusValidationError)):
        return EXIT_VALIDATION
    return EXIT_VALIDATION


@click.group()
def main():
    """Maximum-likelihood word generation order tools."""


def _adhoc_sentence(text: str) -> Sentence:
    words = corpus_mod.segment_words(text)
    return Sentence(
        id="adhoc",
        text=text,
        words=tuple(words),
        sentence_type=SentenceType.DECLARATIVE,
        structure=Structure.SVO,
        triplet_id="adhoc",
    )


@main.command("order")
@click.option("--text", "text", help="Sentence text to analyze.")
@click.option("--id", "sentence_id", help="Sentence id to look up in --corpus.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True),
              help="Corpus CSV (required with --id).")
@click.option("--scorer", "scorer_spec",
              help="Masked scorer: ref:neighbor | ref:uniform:<p> | table:<path> | remote:<url>.")
@click.option("--cap", default=lattice.DEFAULT_CAP, show_default=True,
              help="Maximum sentence length.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
              show_default=True)
def cmd_order(text, sentence_id, corpus_path, scorer_spec, cap, fmt):
    """Compute the optimal generation order of one sentence."""
    if bool(text) == bool(sentence_id):
        raise click.UsageError("give exactly one of --text or --id")
    try:
        if text:
            sentence = _adhoc_sentence(text)
        else:
            if not corpus_path:
                raise click.UsageError("--id requires --corpus")
            corpus = corpus_mod.load_corpus(corpus_path)
            matches = [s for s in corpus.records if s.id == sentence_id]
            if not matches:
                raise click.ClickException(f"no sentence with id {sentence_id!r}")
            sentence = matches[0]
        scorer = CachingScorer(_resolve_scorer(scorer_spec, ENV_MASKED))
        result = lattice.viterbi_optimal_order(sentence, scorer, cap=cap)
    except MlorderError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))

    rho = stats.rho_vs_causal(result.order)
    payload = {
        "id": sentence.id,
        "words": list(sentence.words),
        "order_indices": list(result.order.order),
        "order_words": [sentence.words[i] for i in result.order.order],
        "logp": result.logp,
        "log10p": result.logp / LOG10,
        "prob": math.exp(result.logp),
        "rho_vs_causal": rho,
        "states_visited": result.states_visited,
        "scorer_calls": result.scorer_calls,
    }
    if fmt == "json":
        click.echo(json.dumps(payload, sort_keys=True))
    else:
        order_1based = " ".join(
            f"{step + 1}:{word}" for step, word in enumerate(payload["order_words"])
        )
        click.echo(f"sentence : {sentence.text}")
        click.echo(f"order    : {order_1based}")
        click.echo(f"indices  : {payload['order_indices']}")
        click.echo(f"logp     : {result.logp:.6f} (p = {payload['prob']:.6g})")
        click.echo(f"rho      : {rho:.4f}")
        click.echo(f"states   : {result.states_visited}, scorer calls: {result.scorer_calls}")


def analyze_sentence(sentence: Sentence, masked_scorer, causal_scorer,
                     cap: int = lattice.DEFAULT_CAP) -> AnalysisRecord:
    """Full per-sentence analysis: optimal order, causal baseline, metrics."""
    result = lattice.viterbi_optimal_order(sentence, masked_scorer, cap=cap)
    logp_causal = causal_mod.causal_sequence_logprob(sentence, causal_scorer)
    return AnalysisRecord(
        sentence_id=sentence.id,
        triplet_id=sentence.triplet_id,
        sentence_type=sentence.sentence_type,
        structure=sentence.structure,
        n_words=sentence.n,
        optimal_order=result.order,
        logp_optimal_noncausal=result.logp,
        logp_causal=logp_causal,
        rho=stats.rho_vs_causal(result.order),
        ratio_db=stats.ratio_db(result.logp, logp_causal),
    )


def _record_to_json(rec: AnalysisRecord) -> dict:
    return {
        "id": rec.sentence_id,
        "triplet_id": rec.triplet_id,
        "sentence_type": rec.sentence_type.value,
        "structure": rec.structure.value,
        "n_words": rec.n_words,
        "optimal_order": list(rec.optimal_order.order),
        "logp_optimal_noncausal": rec.logp_optimal_noncausal,
        "log10p_optimal_noncausal": rec.logp_optimal_noncausal / LOG10,
        "logp_causal": rec.logp_causal,
        "log10p_causal": rec.logp_causal / LOG10,
        "rho": rec.rho,
        "ratio_db": rec.ratio_db,
    }


def _write_aggregates(path: Path, aggregates):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "structure", "count",
            "mean_prob_optimal_noncausal", "mean_prob_causal", "mean_rho",
            "geomean_prob_optimal_noncausal", "geomean_prob_causal",
        ])
        for agg in aggregates:
            writer.writerow([
                agg.structure.value, agg.count,
                repr(agg.mean_linear_prob_optimal_noncausal),
                repr(agg.mean_linear_prob_causal),
                repr(agg.mean_rho),
                repr(agg.geomean_prob_optimal_noncausal),
                repr(agg.geomean_prob_causal),
            ])


def _write_rho_histograms(path: Path, records, bins):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sentence_type", "structure", "bin_lo", "bin_hi", "count"])
        for stype in SentenceType:
            of_type = [r for r in records if r.sentence_type == stype]
            if not of_type:
                continue
            groups = [("all", of_type)] + [
                (s.value, [r for r in of_type if r.structure == s]) for s in Structure
            ]
            for label, group in groups:
                if not group:
                    continue
                hist = stats.histogram([r.rho for r in group], bins=bins,
                                       value_range=(-1.0, 1.0))
                for lo, hi, count in zip(hist.edges, hist.edges[1:], hist.counts):
                    writer.writerow([stype.value, label, repr(lo), repr(hi), count])


def _write_ratio_summary(path: Path, records):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sentence_type", "structure", "count",
                         "mean_ratio_db", "min_ratio_db", "max_ratio_db"])
        for stype in SentenceType:
            for structure in Structure:
                group = [r for r in records
                         if r.sentence_type == stype and r.structure == structure]
                if not group:
                    continue
                ratios = [r.ratio_db for r in group]
                writer.writerow([
                    stype.value, structure.value, len(group),
                    repr(math.fsum(ratios) / len(ratios)),
                    repr(min(ratios)), repr(max(ratios)),
                ])


@main.command("analyze")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--masked-scorer", "masked_spec", help="Masked scorer spec.")
@click.option("--causal-scorer", "causal_spec", help="Causal scorer spec.")
@click.option("--bins", default=20, show_default=True)
@click.option("--workers", default=1, show_default=True)
@click.option("--cap", default=lattice.DEFAULT_CAP, show_default=True)
@click.option("--strict/--no-strict", default=False, show_default=True,
              help="Enforce triplet completeness when loading.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def cmd_analyze(corpus_path, masked_spec, causal_spec, bins, workers, cap, strict, out_dir):
    """Run the corpus-scale comparative analysis and write report files."""
    if bins < 1:
        raise click.UsageError("--bins must be >= 1")
    if workers < 1:
        raise click.UsageError("--workers must be >= 1")
    try:
        corpus = corpus_mod.load_corpus(corpus_path, strict=strict)
        masked_scorer = CachingScorer(_resolve_scorer(masked_spec, ENV_MASKED))
        causal_scorer = CachingScorer(_resolve_scorer(causal_spec, ENV_CAUSAL))
    except MlorderError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(_exit_for(exc))

    records: list[AnalysisRecord] = []
    failures: list[tuple[str, str]] = []

    def run_one(sentence):
        return analyze_sentence(sentence, masked_scorer, causal_scorer, cap=cap)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {s.id: pool.submit(run_one, s) for s in corpus.records}
    for sid in sorted(futures):
        try:
            records.append(futures[sid].result())
        except MlorderError as exc:
            failures.append((sid, str(exc)))

    records.sort(key=lambda r: r.sentence_id)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "records.jsonl", "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(_record_to_json(rec), sort_keys=True) + "\n")

    if records:
        aggregates = stats.aggregate_by_structure(records)
        for stype, name in [(SentenceType.DECLARATIVE, "aggregates_declarative.csv"),
                            (SentenceType.INTERROGATIVE, "aggregates_interrogative.csv")]:
            rows = [a for a in aggregates if a.sentence_type == stype]
            if rows:
                _write_aggregates(out / name, rows)
        _write_rho_histograms(out / "rho_histograms.csv", records, bins)
        _write_ratio_summary(out / "ratio_db_summary.csv", records)

    click.echo(f"analyzed {len(records)}/{len(corpus.records)} sentences -> {out}")
    if failures:
        click.echo(f"{len(failures)} sentences failed:", err=True)
        for sid, msg in failures:
            click.echo(f"  {sid}: {msg}", err=True)
        sys.exit(EXIT_PARTIAL)


@main.command("validate")
@click.argument("corpus_path", type=click.Path(exists=True))
def cmd_validate(corpus_path):
    """Strict-validate a corpus file and print its label counts."""
    try:
        corpus = corpus_mod.load_corpus(corpus_path, strict=True)
    except MlorderError as exc:
        click.echo(f"validation failed: {exc}", err=True)
        sys.exit(_exit_for(exc))
    triplets = {s.triplet_id for s in corpus.records}
    click.echo(f"{len(corpus.records)} records, {len(triplets)} triplets complete")
    for label, count in sorted(corpus.counts_by_type.items()):
        click.echo(f"  sentence_type {label}: {count}")
    for label, count in sorted(corpus.counts_by_structure.items()):
        click.echo(f"  structure {label}: {count}")


@main.command("selfcheck")
@click.option("--max-n", default=6, show_default=True,
              help="Largest sentence length to check (<= 8).")
@click.option("--trials", default=50, show_default=True)
@click.option("--seed", default=0, show_default=True)
def cmd_selfcheck(max_n, trials, seed):
    """Check the subset DP against brute-force enumeration on random tables."""
    if not 2 <= max_n <= lattice.BRUTE_FORCE_CAP:
        raise click.UsageError(f"--max-n must be in 2..{lattice.BRUTE_FORCE_CAP}")
    if trials < 1:
        raise click.UsageError("--trials must be >= 1")
    failed = False
    for n in range(2, max_n + 1):
        mismatches = 0
        for trial in range(trials):
            trial_seed = seed * 1_000_003 + n * 1_009 + trial
            rng = random.Random(trial_seed)
            scorer = random_table_scorer(n, rng)
            sentence = Sentence(
                id=f"selfcheck-n{n}-t{trial}",
                text=" ".join(f"w{i}" for i in range(n)),
                words=tuple(f"w{i}" for i in range(n)),
                sentence_type=SentenceType.DECLARATIVE,
                structure=Structure.SVO,
                triplet_id="selfcheck",
            )
            dp = lattice.viterbi_optimal_order(sentence, scorer)
            oracle = lattice.brute_force_optimal_order(sentence, scorer)
            if dp.order.order != oracle.order.order or abs(dp.logp - oracle.logp) > 1e-9:
                mismatches += 1
                click.echo(
                    f"MISMATCH n={n} seed={trial_seed} sentence={sentence.id}: "
                    f"dp={dp.order.order} ({dp.logp:.12f}) vs "
                    f"oracle={oracle.order.order} ({oracle.logp:.12f})",
                    err=True,
                )
        status = "ok" if mismatches == 0 else f"{mismatches} MISMATCHES"
        click.echo(f"n={n}: {trials} trials, {status}")
        failed = failed or mismatches > 0
    if failed:
        sys.exit(EXIT_PARTIAL)


if __name__ == "__main__":
    main()
