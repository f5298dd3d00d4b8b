"""Cross-lingual document retrieval over the target side of a comparable corpus.

Source documents are turned into target-language query bags through the
bilingual dictionary and ranked against a TF-IDF inverted index.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import BilingualDictionary, ComparableCorpus, Sentence, is_number

DEFAULT_TOP_K = 20


@dataclass
class InvertedIndex:
    postings: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    doc_lengths: dict[str, int] = field(default_factory=dict)
    _norms: dict[str, float] = field(default_factory=dict, repr=False)

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        if df == 0:
            return 0.0
        return math.log(self.doc_count / df)

    def doc_norm(self, doc_id: str) -> float:
        return self._norms.get(doc_id, 0.0)


def build_index(corpus: ComparableCorpus) -> InvertedIndex:
    """Index every target document; terms are lowercased."""
    index = InvertedIndex()
    for doc_id, sentences in corpus.target_docs.items():
        tf = Counter(tok.lower() for s in sentences for tok in s.tokens)
        index.doc_lengths[doc_id] = sum(tf.values())
        for term, count in tf.items():
            index.postings.setdefault(term, []).append((doc_id, count))

    sq: dict[str, float] = dict.fromkeys(index.doc_lengths, 0.0)
    for term, plist in index.postings.items():
        idf = index.idf(term)
        for doc_id, count in plist:
            sq[doc_id] += (count * idf) ** 2
    index._norms = {d: math.sqrt(v) for d, v in sq.items()}
    return index


def make_query(source_doc: Iterable[Sentence], dictionary: BilingualDictionary) -> Counter:
    """Bag of lowercased dictionary translations of every source token.

    Untranslatable tokens are dropped, except numbers, which pass through.
    """
    bag: Counter = Counter()
    for sentence in source_doc:
        for tok in sentence.tokens:
            translations = dictionary.lookup(tok)
            if translations:
                for translation in translations:
                    bag.update(w.lower() for w in translation.split())
            elif is_number(tok):
                bag[tok] += 1
    return bag


def score_documents(index: InvertedIndex, query: Counter) -> dict[str, float]:
    """TF-IDF cosine for every document sharing at least one query term."""
    weights = {term: count * index.idf(term) for term, count in query.items() if term in index.postings}
    qnorm = math.sqrt(sum(w * w for w in weights.values()))
    scores: dict[str, float] = {}
    for term in query:
        for doc_id, count in index.postings.get(term, ()):
            scores.setdefault(doc_id, 0.0)
            w = weights[term]
            if w:
                scores[doc_id] += count * index.idf(term) * w
    for doc_id, dot in scores.items():
        denom = qnorm * index.doc_norm(doc_id)
        scores[doc_id] = dot / denom if denom > 0.0 else 0.0
    return scores


def retrieve(index: InvertedIndex, query: Counter, k: int = DEFAULT_TOP_K) -> list[str]:
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = score_documents(index, query)
    ranked = sorted(scores, key=lambda d: (-scores[d], d))
    return ranked[:k]
