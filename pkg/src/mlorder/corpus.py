"""Corpus ingestion: CSV parsing, validation, word segmentation.

Schema: UTF-8 CSV with header ``id,triplet_id,sentence_type,structure,text``.
Each triplet of subject/verb/object content appears in all six constituent
orders; strict mode enforces that completeness.
"""
from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

from .core import Sentence, SentenceType, Structure
from .errors import CorpusParseError, CorpusValidationError

EXPECTED_HEADER = ["id", "triplet_id", "sentence_type", "structure", "text"]

_OPENING_PUNCT = "¿¡"
_CLOSING_PUNCT = ".?!,;"


def segment_words(text: str, sentence_type: SentenceType | None = None) -> list[str]:
    """Whitespace-split into word units with punctuation attached to words.

    Freestanding opening punctuation joins the following word; freestanding
    closing punctuation joins the preceding word. Case is never normalized.
    """
    if not text.strip():
        raise CorpusParseError("empty text")
    words: list[str] = []
    prefix = ""
    for token in text.split():
        if all(c in _OPENING_PUNCT for c in token):
            prefix += token
            continue
        token = prefix + token
        prefix = ""
        if all(c in _CLOSING_PUNCT for c in token) and words:
            words[-1] += token
        else:
            words.append(token)
    if prefix:
        # Dangling opening punctuation with no word after it.
        if not words:
            raise CorpusParseError(f"text is only punctuation: {text!r}")
        words[-1] += prefix
    if len(words) < 2:
        raise CorpusParseError(f"too short, need at least 2 word units: {text!r}")
    return words


@dataclass(frozen=True)
class CorpusFile:
    records: tuple[Sentence, ...]
    source: str
    counts_by_type: dict[str, int]
    counts_by_structure: dict[str, int]


def _parse_row(row: dict[str, str], line: int) -> Sentence:
    for key in EXPECTED_HEADER:
        if row.get(key) is None or row[key] == "":
            raise CorpusParseError(f"missing field {key!r}", line=line)
    try:
        stype = SentenceType(row["sentence_type"])
    except ValueError:
        raise CorpusParseError(
            f"unknown sentence_type {row['sentence_type']!r}", line=line) from None
    try:
        structure = Structure(row["structure"])
    except ValueError:
        raise CorpusParseError(
            f"unknown structure {row['structure']!r}", line=line) from None
    try:
        words = segment_words(row["text"], stype)
    except CorpusParseError as exc:
        raise CorpusParseError(str(exc), line=line) from None
    return Sentence(
        id=row["id"],
        text=row["text"],
        words=tuple(words),
        sentence_type=stype,
        structure=structure,
        triplet_id=row["triplet_id"],
    )


def load_corpus(path: str, strict: bool = False) -> CorpusFile:
    """Parse and validate a corpus CSV.

    Always rejects malformed rows and duplicate ids; strict mode additionally
    requires every triplet_id to appear with exactly the six structures.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise CorpusParseError("empty file", line=1)
        if [f.strip() for f in reader.fieldnames] != EXPECTED_HEADER:
            raise CorpusParseError(
                f"bad header {reader.fieldnames!r}, expected {EXPECTED_HEADER!r}", line=1)
        records = []
        seen_ids: set[str] = set()
        for row in reader:
            sent = _parse_row(row, reader.line_num)
            if sent.id in seen_ids:
                raise CorpusValidationError(f"duplicate sentence id {sent.id!r}")
            seen_ids.add(sent.id)
            records.append(sent)

    if strict:
        by_triplet: dict[str, set[Structure]] = {}
        for sent in records:
            by_triplet.setdefault(sent.triplet_id, set()).add(sent.structure)
        incomplete = sorted(
            tid for tid, structs in by_triplet.items() if len(structs) != len(Structure)
        )
        if incomplete:
            raise CorpusValidationError(
                "incomplete triplets (need all 6 structures): " + ", ".join(incomplete))

    return CorpusFile(
        records=tuple(records),
        source=str(path),
        counts_by_type=dict(Counter(s.sentence_type.value for s in records)),
        counts_by_structure=dict(Counter(s.structure.value for s in records)),
    )
