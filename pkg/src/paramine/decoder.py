"""Monotone word-for-word gloss translation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import BilingualDictionary, Sentence
from .lexicon import Lexicon, translate_token

# Stand-in log-probability for tokens the lexicon does not translate.
PASS_THROUGH_LOGP = math.log(0.5)


@dataclass(frozen=True)
class GlossTranslation:
    source: Sentence
    tokens: tuple[str, ...]
    # Diagnostic only; selection never looks at it.
    model_score: float

    def __len__(self) -> int:
        return len(self.tokens)


def gloss_tokens(lex: Lexicon, dictionary: BilingualDictionary | None, tokens) -> tuple[tuple[str, ...], float]:
    out = []
    score = 0.0
    for tok in tokens:
        best = lex.best(tok)
        if best is not None:
            out.append(best[0])
            score += math.log(best[1])
        else:
            out.append(translate_token(lex, dictionary, tok))
            score += PASS_THROUGH_LOGP
    return tuple(out), score


def gloss(lex: Lexicon, dictionary: BilingualDictionary | None, s: Sentence) -> GlossTranslation:
    tokens, score = gloss_tokens(lex, dictionary, s.tokens)
    return GlossTranslation(s, tokens, score)
