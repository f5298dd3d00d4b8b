"""The iterative mining loop.

Each iteration ``i``:

1. trains a lexicon on the seed corpus plus the pairs mined in round ``i-1``;
2. evaluates it on every test set (one report row);
3. glosses every source sentence of the comparable corpus, scores it
   against the sentences of its linked or retrieved target documents and
   keeps the ``nbest`` candidates;
4. selects the new mined set, which replaces the previous one.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import (
    BilingualDictionary,
    ComparableCorpus,
    FormatError,
    ParallelCorpus,
    SentencePair,
    load_comparable,
    load_dictionary,
    load_parallel,
    write_parallel,
)
from .decoder import gloss, gloss_tokens
from .lexicon import Lexicon, estimate, load_lexicon, write_lexicon
from .metrics import TestSet, bleu, load_test_set, nist
from .retrieval import InvertedIndex, build_index, make_query, retrieve
from .scorer import ScoreWeights, similarity
from .selector import CandidatePair, ThresholdTable, select, top_n

log = logging.getLogger(__name__)

LEXICON_FILE = "lexicon.tsv"
MINED_FILE = "mined.jsonl"
STATE_FILE = "state.json"


class ConfigError(ValueError):
    pass


class CheckpointError(RuntimeError):
    pass


@dataclass(frozen=True)
class LoopConfig:
    seed: Path
    comparable: Path
    dictionary: Path | None = None
    test_sets: dict[str, Path] = field(default_factory=dict)
    iterations: int = 10
    nbest: int = 5
    top_k_docs: int = 20
    em_iters: int = 10
    weights: ScoreWeights = ScoreWeights()
    thresholds: ThresholdTable = ThresholdTable()
    allow_shared_targets: bool = False

    def __post_init__(self):
        if self.iterations < 0:
            raise ConfigError("iterations must be >= 0")
        if self.nbest < 1:
            raise ConfigError("nbest must be >= 1")
        if self.top_k_docs < 1:
            raise ConfigError("top_k_docs must be >= 1")
        if self.em_iters < 1:
            raise ConfigError("em_iters must be >= 1")

    @classmethod
    def from_dict(cls, data: dict, base_dir: str | Path = ".") -> LoopConfig:
        base = Path(base_dir)

        def path(key, required=True):
            value = data.get(key)
            if value is None:
                if required:
                    raise ConfigError(f"config is missing {key!r}")
                return None
            return base / value

        test_sets = data.get("test_sets") or {}
        if isinstance(test_sets, list):
            test_sets = {Path(p).stem: p for p in test_sets}
        if not isinstance(test_sets, dict):
            raise ConfigError("test_sets must be an object or a list of paths")
        d = LoopConfig.__dataclass_fields__
        try:
            weights = ScoreWeights(
                alpha=tuple(data.get("alpha", ScoreWeights.alpha)),
                beta_number=float(data.get("beta_number", ScoreWeights.beta_number)),
                beta_propn=float(data.get("beta_propn", ScoreWeights.beta_propn)),
                max_n=int(data.get("max_n", 0)),
            )
            thresholds = ThresholdTable(tuple(tuple(b) for b in data["thresholds"])) if "thresholds" in data else ThresholdTable()
            return cls(
                seed=path("seed"),
                comparable=path("comparable"),
                dictionary=path("dictionary", required=False),
                test_sets={str(k): base / v for k, v in test_sets.items()},
                iterations=int(data.get("iterations", d["iterations"].default)),
                nbest=int(data.get("nbest", d["nbest"].default)),
                top_k_docs=int(data.get("top_k_docs", d["top_k_docs"].default)),
                em_iters=int(data.get("em_iters", d["em_iters"].default)),
                weights=weights,
                thresholds=thresholds,
                allow_shared_targets=bool(data.get("allow_shared_targets", False)),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "nbest": self.nbest,
            "top_k_docs": self.top_k_docs,
            "em_iters": self.em_iters,
            "alpha": list(self.weights.alpha),
            "beta_number": self.weights.beta_number,
            "beta_propn": self.weights.beta_propn,
            "max_n": self.weights.max_n,
            "thresholds": self.thresholds.to_json(),
            "allow_shared_targets": self.allow_shared_targets,
            "seed": str(self.seed),
            "comparable": str(self.comparable),
            "dictionary": None if self.dictionary is None else str(self.dictionary),
            "test_sets": {k: str(v) for k, v in self.test_sets.items()},
        }

    def fingerprint(self) -> str:
        """Hash of every setting except ``iterations`` plus the input file contents.

        Leaving the iteration count out lets a checkpointed run be extended.
        """
        settings = self.to_dict()
        del settings["iterations"]
        h = hashlib.sha256(json.dumps(settings, sort_keys=True).encode("utf-8"))
        files = [self.seed, self.comparable, self.dictionary, *self.test_sets.values()]
        for p in files:
            if p is not None:
                h.update(Path(p).read_bytes())
        return h.hexdigest()


def load_config(path: str | Path) -> LoopConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return LoopConfig.from_dict(data, base_dir=path.parent)


@dataclass(frozen=True)
class Inputs:
    seed: ParallelCorpus
    comparable: ComparableCorpus
    dictionary: BilingualDictionary
    test_sets: tuple[TestSet, ...]
    index: InvertedIndex

    @classmethod
    def load(cls, config: LoopConfig) -> Inputs:
        comparable = load_comparable(config.comparable)
        dictionary = load_dictionary(config.dictionary) if config.dictionary else BilingualDictionary()
        return cls(
            seed=load_parallel(config.seed),
            comparable=comparable,
            dictionary=dictionary,
            test_sets=tuple(load_test_set(p, name) for name, p in config.test_sets.items()),
            index=build_index(comparable),
        )


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    corpus_size: int
    mined_count: int
    # Pairs selected in this iteration, i.e. the next round's mined_count.
    selected_count: int = 0
    per_test_set: dict[str, tuple[float, float]] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "iteration": self.iteration,
            "corpus_size": self.corpus_size,
            "mined_count": self.mined_count,
            "selected_count": self.selected_count,
            "per_test_set": {k: list(v) for k, v in self.per_test_set.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> IterationReport:
        return cls(
            iteration=data["iteration"],
            corpus_size=data["corpus_size"],
            mined_count=data["mined_count"],
            selected_count=data["selected_count"],
            per_test_set={k: (v[0], v[1]) for k, v in data["per_test_set"].items()},
        )


# ---------------------------------------------------------------------------
# labeling and selection


def candidate_docs(source_doc_id: str, inputs: Inputs, top_k: int) -> list[str]:
    comparable = inputs.comparable
    if source_doc_id in comparable.links:
        return list(comparable.links[source_doc_id])
    query = make_query(comparable.source_docs[source_doc_id], inputs.dictionary)
    return retrieve(inputs.index, query, top_k)


def label_document(
    source_doc_id: str,
    lex: Lexicon,
    inputs: Inputs,
    weights: ScoreWeights,
    nbest: int,
    top_k: int,
) -> list[CandidatePair]:
    """Top-``nbest`` scored targets for every sentence of one source document."""
    targets = [s for d in candidate_docs(source_doc_id, inputs, top_k) for s in inputs.comparable.target_docs[d]]
    out: list[CandidatePair] = []
    if not targets:
        return out
    for s in inputs.comparable.source_docs[source_doc_id]:
        g = gloss(lex, inputs.dictionary, s)
        scored = [CandidatePair(s, g, t, similarity(g, t, weights)) for t in targets]
        out.extend(top_n(scored, nbest))
    return out


_worker_ctx: tuple | None = None


def _init_worker(ctx):
    global _worker_ctx
    _worker_ctx = ctx


def _label_in_worker(doc_id: str) -> list[CandidatePair]:
    return label_document(doc_id, *_worker_ctx)


def label(
    lex: Lexicon,
    inputs: Inputs,
    weights: ScoreWeights,
    nbest: int,
    top_k: int,
    jobs: int = 1,
) -> list[CandidatePair]:
    """Candidate set for one iteration, in (source doc_id, index) order."""
    doc_ids = sorted(inputs.comparable.source_docs)
    ctx = (lex, inputs, weights, nbest, top_k)
    if jobs > 1 and len(doc_ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(ctx,)) as pool:
            chunks = list(pool.map(_label_in_worker, doc_ids, chunksize=max(1, len(doc_ids) // (4 * jobs))))
    else:
        chunks = [label_document(d, *ctx) for d in doc_ids]
    return [c for chunk in chunks for c in chunk]


def mine_once(lex: Lexicon, inputs: Inputs, config: LoopConfig, iteration: int, jobs: int = 1):
    """One labeling, scoring and selecting pass with a fixed lexicon.

    Returns ``(candidates, mined)`` where ``mined`` holds the selected pairs
    tagged with ``iteration``.
    """
    candidates = label(lex, inputs, config.weights, config.nbest, config.top_k_docs, jobs)
    chosen = select(candidates, config.thresholds, config.allow_shared_targets)
    mined = ParallelCorpus(tuple(SentencePair(c.source, c.target, iteration) for c in chosen))
    return candidates, mined


def evaluate(lex: Lexicon, dictionary: BilingualDictionary, test_set: TestSet) -> tuple[float, float]:
    """``(nist, bleu)`` of the gloss decoder, BLEU in [0, 1]."""
    hyps = [gloss_tokens(lex, dictionary, src.tokens)[0] for src in test_set.sources]
    refs = test_set.references
    return nist(hyps, refs), bleu(hyps, refs)


# ---------------------------------------------------------------------------
# loop state


@dataclass
class LoopState:
    next_iteration: int = 0
    mined: ParallelCorpus = field(default_factory=ParallelCorpus)
    reports: list[IterationReport] = field(default_factory=list)
    lexicon: Lexicon | None = None
    fingerprint: str = ""


def checkpoint(state: LoopState, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    if state.lexicon is not None:
        write_lexicon(state.lexicon, path / LEXICON_FILE)
    write_parallel(state.mined, path / MINED_FILE)
    payload = {
        "next_iteration": state.next_iteration,
        "fingerprint": state.fingerprint,
        "reports": [r.to_json() for r in state.reports],
    }
    tmp = path / (STATE_FILE + ".tmp")
    tmp.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    os.replace(tmp, path / STATE_FILE)


def resume(path: str | Path, config: LoopConfig | None = None) -> LoopState:
    """Reload a checkpoint; with ``config`` its fingerprint must match."""
    path = Path(path)
    state_file = path / STATE_FILE
    if not state_file.is_file():
        raise CheckpointError(f"no checkpoint in {path}")
    try:
        payload = json.loads(state_file.read_text(encoding="utf-8"))
        mined = load_parallel(path / MINED_FILE, keep_origin=True)
    except (OSError, ValueError, KeyError) as exc:
        raise CheckpointError(f"unreadable checkpoint in {path}: {exc}") from None
    if config is not None and payload["fingerprint"] != config.fingerprint():
        raise CheckpointError("config changed since checkpoint")
    lex_file = path / LEXICON_FILE
    return LoopState(
        next_iteration=payload["next_iteration"],
        mined=mined,
        reports=[IterationReport.from_json(r) for r in payload["reports"]],
        lexicon=load_lexicon(lex_file) if lex_file.is_file() else None,
        fingerprint=payload["fingerprint"],
    )


class Transducer:
    """Stateful driver of the mining loop; one ``step`` per iteration."""

    def __init__(self, config: LoopConfig, inputs: Inputs | None = None, state: LoopState | None = None, jobs: int = 1):
        self.config = config
        self.inputs = inputs if inputs is not None else Inputs.load(config)
        self.state = state if state is not None else LoopState(fingerprint=config.fingerprint())
        self.jobs = jobs
        self.last_candidates: list[CandidatePair] = []

    @classmethod
    def resume(cls, config: LoopConfig, path: str | Path, jobs: int = 1) -> Transducer:
        return cls(config, state=resume(path, config), jobs=jobs)

    @property
    def done(self) -> bool:
        return self.state.next_iteration > self.config.iterations

    def step(self) -> IterationReport:
        st = self.state
        i = st.next_iteration
        training = self.inputs.seed + st.mined
        lex = estimate(training, self.inputs.dictionary, self.config.em_iters)
        scores = {ts.name: evaluate(lex, self.inputs.dictionary, ts) for ts in self.inputs.test_sets}
        candidates, mined = mine_once(lex, self.inputs, self.config, i, self.jobs)
        report = IterationReport(
            iteration=i,
            corpus_size=len(training),
            mined_count=len(st.mined),
            selected_count=len(mined),
            per_test_set=scores,
        )
        log.info("iteration %d: trained on %d pairs, selected %d", i, len(training), len(mined))
        self.last_candidates = candidates
        st.reports.append(report)
        st.lexicon = lex
        st.mined = mined
        st.next_iteration = i + 1
        return report

    def run(self, checkpoint_dir: str | Path | None = None, stop_after: int | None = None) -> list[IterationReport]:
        """Run remaining iterations, checkpointing after each when asked.

        ``stop_after`` ends the run once that iteration is complete.
        """
        while not self.done:
            report = self.step()
            if checkpoint_dir is not None:
                checkpoint(self.state, checkpoint_dir)
            if stop_after is not None and report.iteration >= stop_after:
                break
        return list(self.state.reports)


def run_loop(config: LoopConfig, jobs: int = 1) -> list[IterationReport]:
    return Transducer(config, jobs=jobs).run()


# ---------------------------------------------------------------------------
# report files


def report_header(test_names: Sequence[str]) -> list[str]:
    cols = ["iteration", "corpus_size"]
    for name in test_names:
        cols += [f"{name}.NIST", f"{name}.BLEU"]
    return cols


def format_report_tsv(reports: Sequence[IterationReport]) -> str:
    names = list(reports[0].per_test_set) if reports else []
    lines = ["\t".join(report_header(names))]
    for r in reports:
        row = [str(r.iteration), str(r.corpus_size)]
        for name in names:
            n, b = r.per_test_set[name]
            row += [f"{n:.4f}", f"{100 * b:.2f}"]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def format_mining_tsv(reports: Sequence[IterationReport]) -> str:
    lines = ["iteration\tcorpus_size\tmined_count\tselected_count"]
    for r in reports:
        lines.append(f"{r.iteration}\t{r.corpus_size}\t{r.mined_count}\t{r.selected_count}")
    return "\n".join(lines) + "\n"


def render_report(tsv: str) -> str:
    """Aligned table with the iteration / corpus size / per-test-set layout."""
    rows = [line.split("\t") for line in tsv.splitlines() if line]
    if not rows:
        raise FormatError("empty report")
    header, body = rows[0], rows[1:]
    if header[:2] != ["iteration", "corpus_size"] or len(header) % 2:
        raise FormatError("not a report TSV")
    names = [header[i].rsplit(".", 1)[0] for i in range(2, len(header), 2)]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} columns")

    table = [["Iteration", "parallel corpus size"] + ["NIST", "BLEU"] * len(names)]
    for row in body:
        table.append([f"{row[0]} (baseline)" if row[0] == "0" else row[0], *row[1:]])
    widths = [max(len(r[c]) for r in table) for c in range(len(header))]
    # A test-set name spans its NIST and BLEU columns.
    for j, name in enumerate(names):
        c = 2 + 2 * j
        widths[c + 1] = max(widths[c + 1], len(name) - widths[c] - 2)

    def line(cells):
        return "  ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()

    group = [" " * widths[0], " " * widths[1]]
    for j, name in enumerate(names):
        c = 2 + 2 * j
        group.append(name.ljust(widths[c] + 2 + widths[c + 1]))
    lines = ["  ".join(group).rstrip(), line(table[0])]
    lines += [line(r) for r in table[1:]]
    return "\n".join(lines) + "\n"
