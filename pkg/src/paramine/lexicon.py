"""Word-translation model estimated by EM.

The model generates each target token from one source token of the same
sentence pair, chosen uniformly (IBM Model 1 without the null word):

    P(e_1..e_m | f_1..f_l) = prod_j (1/l) * sum_i t(e_j | f_i)

``Lexicon.probs[f][e]`` holds ``t(e | f)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import BilingualDictionary, FormatError, ParallelCorpus

PRUNE_BELOW = 1e-8


@dataclass(frozen=True)
class Lexicon:
    probs: dict[str, dict[str, float]]
    trained_on: str = ""
    em_iterations: int = 0
    final_log_likelihood: float = float("nan")
    # Corpus log-likelihood after each EM iteration.
    history: tuple[float, ...] = field(default=(), compare=False)

    def best(self, token: str) -> tuple[str, float] | None:
        """Most probable translation of ``token``; ties go to the smaller target."""
        dist = self.probs.get(token)
        if not dist:
            return None
        target = min(dist, key=lambda e: (-dist[e], e))
        return target, dist[target]

    def __contains__(self, token: str) -> bool:
        return bool(self.probs.get(token))


def _training_pairs(corpus: ParallelCorpus, dictionary: BilingualDictionary | None):
    pairs = [(p.source.tokens, p.target.tokens) for p in corpus]
    if dictionary is not None:
        # One pseudo-pair per (headword, translation).
        for head, translations in dictionary.items():
            for translation in translations:
                pairs.append(((head,), tuple(translation.split())))
    return pairs


def _initial_table(pairs) -> dict[str, dict[str, float]]:
    cooc: dict[str, dict[str, None]] = {}
    for src, tgt in pairs:
        for f in src:
            row = cooc.setdefault(f, {})
            for e in tgt:
                row[e] = None
    return {f: dict.fromkeys(row, 1.0 / len(row)) for f, row in cooc.items() if row}


def log_likelihood(pairs, t: dict[str, dict[str, float]]) -> float:
    total = 0.0
    for src, tgt in pairs:
        if not src or not tgt:
            continue
        rows = [t.get(f, {}) for f in src]
        norm = math.log(len(src))
        for e in tgt:
            z = sum(row.get(e, 0.0) for row in rows)
            total += (math.log(z) if z > 0.0 else -math.inf) - norm
    return total


def _em_step(pairs, t: dict[str, dict[str, float]]) -> dict[str, dict[str, float]]:
    counts: dict[str, dict[str, float]] = {}
    for src, tgt in pairs:
        rows = [t.get(f, {}) for f in src]
        for e in tgt:
            weights = [row.get(e, 0.0) for row in rows]
            z = sum(weights)
            if z <= 0.0:
                continue
            for f, w in zip(src, weights):
                if w > 0.0:
                    row = counts.setdefault(f, {})
                    row[e] = row.get(e, 0.0) + w / z

    new_t: dict[str, dict[str, float]] = {}
    for f, row in counts.items():
        total = sum(row.values())
        dist = {e: c / total for e, c in row.items()}
        kept = {e: p for e, p in dist.items() if p >= PRUNE_BELOW}
        if len(kept) < len(dist):
            mass = sum(kept.values())
            kept = {e: p / mass for e, p in kept.items()}
        new_t[f] = kept
    return new_t


def estimate(
    corpus: ParallelCorpus,
    dictionary: BilingualDictionary | None = None,
    em_iters: int = 10,
) -> Lexicon:
    """Train translation probabilities on ``corpus`` plus dictionary pseudo-pairs.

    Starts from a uniform distribution over each source token's
    co-occurring target tokens and runs ``em_iters`` full EM iterations.
    """
    if len(corpus) == 0:
        raise ValueError("cannot estimate from empty corpus")
    if em_iters < 1:
        raise ValueError("em_iters must be >= 1")

    pairs = _training_pairs(corpus, dictionary)
    t = _initial_table(pairs)
    history = []
    for _ in range(em_iters):
        t = _em_step(pairs, t)
        history.append(log_likelihood(pairs, t))
    return Lexicon(
        probs=t,
        trained_on=corpus.fingerprint(),
        em_iterations=em_iters,
        final_log_likelihood=history[-1],
        history=tuple(history),
    )


def translate_token(lex: Lexicon, dictionary: BilingualDictionary | None, token: str) -> str:
    """Lexicon argmax, else first dictionary translation, else ``token`` itself."""
    best = lex.best(token)
    if best is not None:
        return best[0]
    if dictionary is not None:
        first = dictionary.first(token)
        if first is not None:
            return first
    return token


def write_lexicon(lex: Lexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for f in sorted(lex.probs):
            dist = lex.probs[f]
            for e in sorted(dist, key=lambda e: (-dist[e], e)):
                fh.write(f"{f}\t{e}\t{dist[e]:.6f}\n")


def load_lexicon(path: str | Path) -> Lexicon:
    """Read a lexicon TSV; rows printed as zero are dropped and rows renormalized."""
    probs: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected source<TAB>target<TAB>probability")
            try:
                p = float(parts[2])
            except ValueError:
                raise FormatError(f"line {lineno}: bad probability {parts[2]!r}") from None
            if not 0.0 <= p <= 1.0:
                raise FormatError(f"line {lineno}: probability out of range")
            if p > 0.0:
                probs.setdefault(parts[0], {})[parts[1]] = p
    for f, dist in probs.items():
        mass = sum(dist.values())
        probs[f] = {e: p / mass for e, p in dist.items()}
    return Lexicon(probs=probs, trained_on="file:" + str(path))
