"""Turning scored candidates into accepted sentence pairs."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import SRC, TGT, Sentence
from .decoder import GlossTranslation
from .scorer import MatchBreakdown


@dataclass(frozen=True)
class ThresholdTable:
    """Length buckets ``(max_target_length, threshold)``; the last bucket is unbounded."""

    buckets: tuple[tuple[float, float], ...] = ((5, 4.0), (15, 2.5), (30, 2.0), (math.inf, 1.8))

    def __post_init__(self):
        buckets = tuple((math.inf if m is None else m, float(t)) for m, t in self.buckets)
        object.__setattr__(self, "buckets", buckets)
        if not buckets or buckets[-1][0] != math.inf:
            raise ValueError("final threshold bucket must be unbounded")
        limits = [m for m, _ in buckets]
        if any(a >= b for a, b in zip(limits, limits[1:])):
            raise ValueError("bucket lengths must be strictly increasing")
        if any(t <= 0 for _, t in buckets):
            raise ValueError("thresholds must be positive")

    def threshold(self, length: int) -> float:
        for max_len, thr in self.buckets:
            if length <= max_len:
                return thr
        raise AssertionError("unreachable: last bucket is unbounded")

    def to_json(self) -> list:
        return [[None if m == math.inf else int(m), t] for m, t in self.buckets]


@dataclass(frozen=True)
class CandidatePair:
    source: Sentence
    gloss: GlossTranslation
    target: Sentence
    breakdown: MatchBreakdown

    def __post_init__(self):
        if self.source.lang != SRC or self.target.lang != TGT:
            raise ValueError("candidate must pair a source with a target sentence")

    @property
    def score(self) -> float:
        return self.breakdown.score


def _rank_key(c: CandidatePair):
    return (-c.score, c.target.doc_id, c.target.index)


def top_n(candidates: Sequence[CandidatePair], n: int) -> list[CandidatePair]:
    """The ``n`` best candidates of one source sentence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sorted(candidates, key=_rank_key)[:n]


def _strict_max(group: list[CandidatePair]) -> CandidatePair | None:
    best = max(c.score for c in group)
    winners = [c for c in group if c.score == best]
    return winners[0] if len(winners) == 1 else None


def select(
    candidates: Iterable[CandidatePair],
    thresholds: ThresholdTable = ThresholdTable(),
    allow_shared_targets: bool = False,
) -> list[CandidatePair]:
    """Keep candidates above their length threshold that win outright.

    A pair must be the unique best for its source sentence and, unless
    ``allow_shared_targets``, also for its target sentence. Ties reject
    every tied candidate.
    """
    candidates = list(candidates)
    by_source: dict[tuple, list[CandidatePair]] = defaultdict(list)
    by_target: dict[tuple, list[CandidatePair]] = defaultdict(list)
    for c in candidates:
        by_source[c.source.key].append(c)
        by_target[c.target.key].append(c)

    best_for_target = {key: _strict_max(group) for key, group in by_target.items()}
    selected = []
    for group in by_source.values():
        winner = _strict_max(group)
        if winner is None:
            continue
        if not winner.score > thresholds.threshold(len(winner.target)):
            continue
        if not allow_shared_targets and best_for_target[winner.target.key] is not winner:
            continue
        selected.append(winner)
    selected.sort(key=lambda c: c.source.key)
    return selected
