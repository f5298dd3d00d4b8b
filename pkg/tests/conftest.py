import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from paramine.corpus import SRC, TGT, ParallelCorpus, Sentence, SentencePair  # noqa: E402

ACCEPTANCE_RESULTS = {}


def src(tokens, doc="d", index=0):
    return Sentence(tuple(tokens), SRC, doc, index)


def tgt(tokens, doc="d", index=0):
    return Sentence(tuple(tokens), TGT, doc, index)


def corpus(pairs):
    return ParallelCorpus(
        tuple(SentencePair(src(s, "seed", i), tgt(t, "seed", i)) for i, (s, t) in enumerate(pairs))
    )


@pytest.fixture
def make_corpus():
    return corpus


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split()[0][2:])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
