"""Corpus types and loaders.

All text arrives pre-tokenized: one token per whitespace-delimited surface
form, casing preserved. Three on-disk formats are handled here:

* parallel corpus JSONL, ``{"src": [...], "tgt": [...]}`` per line;
* comparable corpus JSONL, one document per line;
* bilingual dictionary TSV, ``source<TAB>translation[<TAB>translation...]``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

SRC = "src"
TGT = "tgt"
LANGS = (SRC, TGT)

_NUMBER_PUNCT = frozenset(".,%-")


class FormatError(ValueError):
    """An input file violates its format contract."""


def is_number(token: str) -> bool:
    """True for tokens like ``14``, ``1,100`` or ``10%``."""
    if not token:
        return False
    has_digit = False
    for ch in token:
        if ch.isdecimal():
            has_digit = True
        elif ch not in _NUMBER_PUNCT:
            return False
    return has_digit


def _check_tokens(tokens: Iterable[str]) -> tuple[str, ...]:
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("sentence has no tokens")
    for tok in tokens:
        if not isinstance(tok, str):
            raise ValueError(f"token {tok!r} is not a string")
        if not tok:
            raise ValueError("empty token")
        if any(ch.isspace() for ch in tok):
            raise ValueError(f"token {tok!r} contains whitespace")
    return tokens


@dataclass(frozen=True)
class Sentence:
    """A tokenized sentence addressed by ``(doc_id, lang, index)``.

    ``numbers`` and ``propn`` are per-token flags computed on construction.
    Proper-noun candidacy only applies to target-language sentences: a
    capitalized token that is not sentence-initial.
    """

    tokens: tuple[str, ...]
    lang: str
    doc_id: str
    index: int
    numbers: tuple[bool, ...] = field(init=False, repr=False, compare=False)
    propn: tuple[bool, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", _check_tokens(self.tokens))
        if self.lang not in LANGS:
            raise ValueError(f"unknown language tag {self.lang!r}")
        object.__setattr__(self, "numbers", tuple(is_number(t) for t in self.tokens))
        if self.lang == TGT:
            flags = tuple(i > 0 and t[0].isupper() for i, t in enumerate(self.tokens))
        else:
            flags = (False,) * len(self.tokens)
        object.__setattr__(self, "propn", flags)

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.index)

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class SentencePair:
    source: Sentence
    target: Sentence
    # None for seed pairs, else the iteration that mined the pair.
    mined: int | None = None

    def __post_init__(self):
        if self.source.lang != SRC or self.target.lang != TGT:
            raise ValueError("pair must hold one source and one target sentence")

    @property
    def origin(self) -> str:
        return "seed" if self.mined is None else f"mined({self.mined})"


@dataclass(frozen=True)
class ParallelCorpus:
    pairs: tuple[SentencePair, ...] = ()

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self.pairs)

    def size(self) -> int:
        return len(self.pairs)

    def __add__(self, other: ParallelCorpus) -> ParallelCorpus:
        return ParallelCorpus(self.pairs + other.pairs)

    def fingerprint(self) -> str:
        """``<pair count>:<sha256 of the token content>``."""
        h = hashlib.sha256()
        for pair in self.pairs:
            h.update(" ".join(pair.source.tokens).encode("utf-8"))
            h.update(b"\t")
            h.update(" ".join(pair.target.tokens).encode("utf-8"))
            h.update(b"\n")
        return f"{len(self.pairs)}:{h.hexdigest()}"


@dataclass(frozen=True)
class ComparableCorpus:
    """Source and target documents plus optional known document links.

    ``links`` only holds source documents whose record carried a ``links``
    field; for those the pipeline skips retrieval.
    """

    source_docs: dict[str, tuple[Sentence, ...]] = field(default_factory=dict)
    target_docs: dict[str, tuple[Sentence, ...]] = field(default_factory=dict)
    links: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for src_id, targets in self.links.items():
            if src_id not in self.source_docs:
                raise FormatError(f"links for unknown source doc_id {src_id}")
            for tgt_id in targets:
                if tgt_id not in self.target_docs:
                    raise FormatError(f"link to unknown doc_id {tgt_id}")

    def source_sentences(self) -> Iterator[Sentence]:
        for doc in self.source_docs.values():
            yield from doc


class BilingualDictionary:
    """Source token to ordered target translations (first = preferred)."""

    def __init__(self, entries: dict[str, list[str]] | None = None):
        self._entries: dict[str, tuple[str, ...]] = {}
        for src, translations in (entries or {}).items():
            if not translations:
                raise ValueError(f"dictionary entry {src!r} has no translations")
            self._entries[src] = tuple(translations)

    def lookup(self, token: str) -> list[str]:
        return list(self._entries.get(token, ()))

    def first(self, token: str) -> str | None:
        translations = self._entries.get(token)
        return translations[0] if translations else None

    def items(self) -> Iterator[tuple[str, tuple[str, ...]]]:
        return iter(self._entries.items())

    def __contains__(self, token: str) -> bool:
        return token in self._entries

    def __len__(self) -> int:
        return len(self._entries)


def _read_lines(path: str | Path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if line.strip():
                yield lineno, line


def _parse_json(lineno: int, line: str) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(record, dict):
        raise FormatError(f"line {lineno}: expected a JSON object")
    return record


def _sentence(lineno: int, tokens, lang: str, doc_id: str, index: int) -> Sentence:
    if not isinstance(tokens, list):
        raise FormatError(f"line {lineno}: {lang} must be a list of tokens")
    try:
        return Sentence(tuple(tokens), lang, doc_id, index)
    except ValueError as exc:
        raise FormatError(f"line {lineno}: {exc}") from None


def load_parallel(path: str | Path, keep_origin: bool = False) -> ParallelCorpus:
    """Read a parallel corpus; every pair is marked as seed.

    With ``keep_origin`` the optional ``origin``/``*_doc``/``*_idx`` fields
    written for mined pairs are restored instead.
    """
    pairs = []
    for n, (lineno, line) in enumerate(_read_lines(path)):
        record = _parse_json(lineno, line)
        for side in LANGS:
            if side not in record:
                raise FormatError(f"line {lineno}: missing {'source' if side == SRC else 'target'}")
        mined = None
        src_ref = ("seed", n)
        tgt_ref = ("seed", n)
        if keep_origin:
            origin = record.get("origin")
            if isinstance(origin, dict) and "mined" in origin:
                mined = int(origin["mined"])
            if "src_doc" in record:
                src_ref = (str(record["src_doc"]), int(record["src_idx"]))
                tgt_ref = (str(record["tgt_doc"]), int(record["tgt_idx"]))
        source = _sentence(lineno, record[SRC], SRC, *src_ref)
        target = _sentence(lineno, record[TGT], TGT, *tgt_ref)
        pairs.append(SentencePair(source, target, mined))
    return ParallelCorpus(tuple(pairs))


def parallel_record(pair: SentencePair) -> dict:
    record = {SRC: list(pair.source.tokens), TGT: list(pair.target.tokens)}
    if pair.mined is not None:
        record["origin"] = {"mined": pair.mined}
        record["src_doc"] = pair.source.doc_id
        record["src_idx"] = pair.source.index
        record["tgt_doc"] = pair.target.doc_id
        record["tgt_idx"] = pair.target.index
    return record


def write_parallel(corpus: ParallelCorpus | Iterable[SentencePair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in corpus:
            fh.write(json.dumps(parallel_record(pair), ensure_ascii=False))
            fh.write("\n")


def load_comparable(path: str | Path) -> ComparableCorpus:
    docs: dict[str, dict[str, tuple[Sentence, ...]]] = {SRC: {}, TGT: {}}
    links: dict[str, tuple[str, ...]] = {}
    for lineno, line in _read_lines(path):
        record = _parse_json(lineno, line)
        doc_id = record.get("doc_id")
        lang = record.get("lang")
        if not isinstance(doc_id, str) or not doc_id:
            raise FormatError(f"line {lineno}: missing doc_id")
        if lang not in LANGS:
            raise FormatError(f"line {lineno}: lang must be 'src' or 'tgt'")
        if doc_id in docs[lang]:
            raise FormatError(f"duplicate doc_id {doc_id}")
        sentences = record.get("sentences", [])
        if not isinstance(sentences, list):
            raise FormatError(f"line {lineno}: sentences must be a list")
        docs[lang][doc_id] = tuple(
            _sentence(lineno, toks, lang, doc_id, i) for i, toks in enumerate(sentences)
        )
        if "links" in record:
            if lang != SRC:
                raise FormatError(f"line {lineno}: links are only allowed on source docs")
            if not isinstance(record["links"], list):
                raise FormatError(f"line {lineno}: links must be a list")
            links[doc_id] = tuple(str(t) for t in record["links"])
    return ComparableCorpus(docs[SRC], docs[TGT], links)


def load_dictionary(path: str | Path) -> BilingualDictionary:
    entries: dict[str, list[str]] = {}
    for lineno, line in _read_lines(path):
        if "\t" not in line:
            raise FormatError(f"line {lineno}: expected source<TAB>translation")
        head, *rest = line.split("\t")
        head = head.strip()
        translations = [t.strip() for t in rest if t.strip()]
        if not head or not translations:
            raise FormatError(f"line {lineno}: empty headword or translation list")
        entries.setdefault(head, []).extend(translations)
    return BilingualDictionary(entries)
