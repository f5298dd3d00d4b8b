"""Corpus-level BLEU and NIST against multi-reference test sets."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import SRC, FormatError, Sentence, _check_tokens

Tokens = Sequence[str]

# Brevity factor is 0.5 when the hypothesis is 2/3 of the reference length.
NIST_BETA = math.log(0.5) / math.log(2.0 / 3.0) ** 2


@dataclass(frozen=True)
class TestSet:
    name: str
    segments: tuple[tuple[Sentence, tuple[tuple[str, ...], ...]], ...]

    __test__ = False  # not a pytest class

    @property
    def sources(self) -> list[Sentence]:
        return [src for src, _ in self.segments]

    @property
    def references(self) -> list[tuple[tuple[str, ...], ...]]:
        return [refs for _, refs in self.segments]


def load_test_set(path: str | Path, name: str | None = None) -> TestSet:
    path = Path(path)
    segments = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(record, dict) or SRC not in record or "refs" not in record:
                raise FormatError(f"line {lineno}: expected {{'src': [...], 'refs': [[...], ...]}}")
            refs = record["refs"]
            if not isinstance(refs, list) or not refs:
                raise FormatError(f"line {lineno}: at least one reference is required")
            try:
                source = Sentence(tuple(record[SRC]), SRC, path.stem, len(segments))
                refs = tuple(_check_tokens(r) for r in refs)
            except (TypeError, ValueError) as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            segments.append((source, refs))
    return TestSet(name or path.stem, tuple(segments))


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _check_lengths(hypotheses, references) -> None:
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses for {len(references)} segments")
    for refs in references:
        if not refs:
            raise ValueError("every segment needs at least one reference")


def _closest_ref_length(hyp_len: int, refs: Sequence[Tokens]) -> int:
    return min((abs(len(r) - hyp_len), len(r)) for r in refs)[1]


def bleu(hypotheses: Sequence[Tokens], references: Sequence[Sequence[Tokens]], max_n: int = 4) -> float:
    """Unsmoothed corpus BLEU in [0, 1]."""
    _check_lengths(hypotheses, references)
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, refs in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += _closest_ref_length(len(hyp), refs)
        for n in range(1, max_n + 1):
            counts = _ngrams(hyp, n)
            max_ref: Counter = Counter()
            for ref in refs:
                max_ref |= _ngrams(ref, n)
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in counts.items())
            totals[n - 1] += sum(counts.values())
    if hyp_len == 0 or any(m == 0 for m in matches):
        return 0.0
    log_precision = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
    brevity = min(0.0, 1.0 - ref_len / hyp_len)
    return math.exp(log_precision + brevity)


def _information_weights(references: Sequence[Sequence[Tokens]], max_n: int) -> dict[tuple[str, ...], float]:
    counts: Counter = Counter()
    total_words = 0
    for refs in references:
        for ref in refs:
            total_words += len(ref)
            for n in range(1, max_n + 1):
                counts.update(_ngrams(ref, n))
    info = {}
    for gram, count in counts.items():
        prefix = counts[gram[:-1]] if len(gram) > 1 else total_words
        info[gram] = math.log2(prefix / count)
    return info


def nist(hypotheses: Sequence[Tokens], references: Sequence[Sequence[Tokens]], max_n: int = 5) -> float:
    """NIST score: information-weighted n-gram matches times a brevity factor."""
    _check_lengths(hypotheses, references)
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    info = _information_weights(references, max_n)
    matched_info = [0.0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0.0
    for hyp, refs in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += sum(len(r) for r in refs) / len(refs)
        for n in range(1, max_n + 1):
            counts = _ngrams(hyp, n)
            max_ref: Counter = Counter()
            for ref in refs:
                max_ref |= _ngrams(ref, n)
            totals[n - 1] += sum(counts.values())
            for g, c in counts.items():
                m = min(c, max_ref[g])
                if m:
                    matched_info[n - 1] += m * info[g]
    score = sum(mi / t for mi, t in zip(matched_info, totals) if t > 0)
    if ref_len > 0:
        ratio = min(1.0, hyp_len / ref_len)
        score *= math.exp(NIST_BETA * math.log(ratio) ** 2) if ratio > 0 else 0.0
    return score
