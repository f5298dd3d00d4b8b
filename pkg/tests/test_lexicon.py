import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus
from oracles import em_oracle
from paramine.corpus import BilingualDictionary, ParallelCorpus
from paramine.lexicon import Lexicon, estimate, load_lexicon, translate_token, write_lexicon

LA_MAISON = [(["la", "maison"], ["the", "house"]), (["la", "fleur"], ["the", "flower"])]


def test_la_maison_oracle_reaches_target():
    t, _ = em_oracle(LA_MAISON, 100)
    assert t[("la", "the")] >= 0.9


def test_la_maison():
    lex = estimate(corpus(LA_MAISON), None, 100)
    assert lex.probs["la"]["the"] >= 0.9
    assert lex.best("maison")[0] == "house"


def test_matches_oracle_without_pruning_effects():
    pairs = [(["a", "b"], ["x", "y"]), (["a", "c"], ["x", "z"]), (["b", "c", "a"], ["y", "z", "x"])]
    t, history = em_oracle(pairs, 5)
    lex = estimate(corpus(pairs), None, 5)
    for (f, e), p in t.items():
        assert lex.probs[f].get(e, 0.0) == pytest.approx(p, abs=1e-12)
    assert lex.history == pytest.approx(history, abs=1e-12)


def test_single_pair_one_iteration():
    lex = estimate(corpus([(["a"], ["b"])]), None, 1)
    assert lex.probs == {"a": {"b": 1.0}}
    assert lex.em_iterations == 1


def test_empty_corpus_rejected():
    with pytest.raises(ValueError, match="cannot estimate from empty corpus"):
        estimate(ParallelCorpus(), None, 5)


def test_zero_iterations_rejected():
    with pytest.raises(ValueError):
        estimate(corpus(LA_MAISON), None, 0)


def test_dictionary_pseudo_pairs():
    d = BilingualDictionary({"猫": ["cat", "kitty"], "股市": ["stock market"]})
    lex = estimate(corpus([(["la"], ["the"])]), d, 5)
    assert lex.probs["猫"] == {"cat": 0.5, "kitty": 0.5}
    assert lex.probs["股市"] == {"stock": 0.5, "market": 0.5}


def test_trained_on_fingerprint():
    lex = estimate(corpus(LA_MAISON), None, 2)
    assert lex.trained_on.startswith("2:")
    assert lex.trained_on != estimate(corpus(LA_MAISON[:1]), None, 2).trained_on


vocab_src = st.sampled_from([f"f{i}" for i in range(15)])
vocab_tgt = st.sampled_from([f"e{i}" for i in range(15)])
pair = st.tuples(st.lists(vocab_src, min_size=1, max_size=6), st.lists(vocab_tgt, min_size=1, max_size=6))


@settings(max_examples=60, deadline=None)
@given(st.lists(pair, min_size=1, max_size=20))
def test_em_invariants(pairs):
    lex = estimate(corpus(pairs), None, 5)
    h = lex.history
    assert all(b >= a - 1e-9 for a, b in zip(h, h[1:]))
    for dist in lex.probs.values():
        assert math.fsum(dist.values()) == pytest.approx(1.0, abs=1e-6)
        assert all(0.0 <= p <= 1.0 for p in dist.values())


@settings(max_examples=20, deadline=None)
@given(st.lists(pair, min_size=1, max_size=10))
def test_determinism(pairs):
    a = estimate(corpus(pairs), None, 4)
    b = estimate(corpus(list(pairs)), None, 4)
    assert a == b
    assert list(a.probs) == list(b.probs)


def test_translate_token_rules():
    lex = Lexicon({"股市": {"stocks": 0.7, "market": 0.3}})
    d = BilingualDictionary({"猫": ["cat", "kitty"]})
    assert translate_token(lex, d, "股市") == "stocks"
    assert translate_token(lex, d, "14") == "14"
    assert translate_token(lex, d, "猫") == "cat"
    assert translate_token(lex, None, "猫") == "猫"


def test_argmax_tie_is_lexicographic():
    lex = Lexicon({"f": {"zeta": 0.5, "alpha": 0.5}})
    assert translate_token(lex, None, "f") == "alpha"


@given(st.text(min_size=1))
def test_pass_through_identity(tok):
    assert translate_token(Lexicon({}), BilingualDictionary(), tok) == tok


def test_lexicon_tsv(tmp_path):
    lex = Lexicon({"b": {"x": 0.25, "y": 0.75}, "a": {"z": 1.0}})
    write_lexicon(lex, tmp_path / "lex.tsv")
    assert (tmp_path / "lex.tsv").read_text() == "a\tz\t1.000000\nb\ty\t0.750000\nb\tx\t0.250000\n"
    back = load_lexicon(tmp_path / "lex.tsv")
    assert back.probs == {"a": {"z": 1.0}, "b": {"y": 0.75, "x": 0.25}}
