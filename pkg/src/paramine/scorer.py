"""Sentence similarity between a gloss translation and a target sentence.

    score = (a_1*C_1 + ... + a_n*C_n + b_num*C_num + b_propn*C_propn) / length

C_k counts matching k-grams, C_num matching number tokens and C_propn
matching proper-noun candidates (all clipped by multiplicity); ``length``
is the longer of the two sentence lengths.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import Sentence, is_number
from .decoder import GlossTranslation

# (suffix, replacement), tried longest suffix first.
_SUFFIX_RULES = (("ies", "y"), ("es", ""), ("s", ""), ("ing", ""), ("ed", ""))
_MIN_STEM = 3


def stem(token: str) -> str:
    """Lowercase and strip one inflectional suffix, keeping >= 3 characters."""
    word = token.lower()
    best = None
    for suffix, repl in _SUFFIX_RULES:
        if word.endswith(suffix):
            stemmed = word[: len(word) - len(suffix)] + repl
            if len(stemmed) >= _MIN_STEM and (best is None or len(suffix) > best[0]):
                best = (len(suffix), stemmed)
    return word if best is None else best[1]


@dataclass(frozen=True)
class ScoreWeights:
    alpha: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0)
    beta_number: float = 2.0
    beta_propn: float = 2.0
    max_n: int = field(default=0)

    def __post_init__(self):
        alpha = tuple(float(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.max_n == 0:
            object.__setattr__(self, "max_n", len(alpha))
        if self.max_n < 1 or len(alpha) != self.max_n:
            raise ValueError(f"alpha must have max_n={self.max_n} weights, got {len(alpha)}")
        if any(a <= 0 for a in alpha) or self.beta_number <= 0 or self.beta_propn <= 0:
            raise ValueError("all weights must be positive")
        if any(a >= b for a, b in zip(alpha, alpha[1:])):
            raise ValueError("alpha weights must be strictly increasing")


@dataclass(frozen=True)
class MatchBreakdown:
    ngram_counts: tuple[int, ...]
    number_matches: int
    propn_matches: int
    length_factor: int
    score: float


def _clipped(a: Counter, b: Counter) -> int:
    return sum(min(count, b[g]) for g, count in a.items() if g in b)


def _ngrams(tokens: Sequence[str], k: int) -> Counter:
    return Counter(tuple(tokens[i : i + k]) for i in range(len(tokens) - k + 1))


def ngram_matches(gloss_tokens: Sequence[str], target_tokens: Sequence[str], k: int, stem_unigrams: bool = False) -> int:
    """Clipped count of shared k-grams, case-insensitive.

    With ``stem_unigrams`` and ``k == 1`` tokens are compared by stem.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    norm = stem if (k == 1 and stem_unigrams) else str.lower
    g = [norm(t) for t in gloss_tokens]
    t = [norm(t) for t in target_tokens]
    return _clipped(_ngrams(g, k), _ngrams(t, k))


def number_matches(gloss_tokens: Sequence[str], target: Sentence) -> int:
    g = Counter(tok.replace(",", "") for tok in gloss_tokens if is_number(tok))
    t = Counter(tok.replace(",", "") for tok, flag in zip(target.tokens, target.numbers) if flag)
    return _clipped(t, g)


def propn_matches(gloss_tokens: Sequence[str], target: Sentence) -> int:
    t = Counter(tok.lower() for tok, flag in zip(target.tokens, target.propn) if flag)
    if not t:
        return 0
    g = Counter(tok.lower() for tok in gloss_tokens)
    return _clipped(t, g)


def similarity(gloss: GlossTranslation | Sequence[str], target: Sentence, weights: ScoreWeights = ScoreWeights()) -> MatchBreakdown:
    tokens = gloss.tokens if isinstance(gloss, GlossTranslation) else tuple(gloss)
    counts = tuple(
        ngram_matches(tokens, target.tokens, k, stem_unigrams=(k == 1)) for k in range(1, weights.max_n + 1)
    )
    c_num = number_matches(tokens, target)
    c_propn = propn_matches(tokens, target)
    length = max(len(tokens), len(target.tokens))

    numerator = 0.0
    for a, c in zip(weights.alpha, counts):
        numerator += a * c
    numerator += weights.beta_number * c_num
    numerator += weights.beta_propn * c_propn
    return MatchBreakdown(counts, c_num, c_propn, length, numerator / length)
