import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import src, tgt
from paramine.corpus import (
    BilingualDictionary,
    FormatError,
    Sentence,
    is_number,
    load_comparable,
    load_dictionary,
    load_parallel,
    write_parallel,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_parallel_two_pairs(tmp_path):
    f = write(tmp_path / "p.jsonl", '{"src": ["猫"], "tgt": ["cat"]}\n{"src": ["狗"], "tgt": ["dog"]}\n')
    c = load_parallel(f)
    assert c.size() == 2
    assert all(p.mined is None and p.origin == "seed" for p in c)
    assert [p.target.tokens for p in c] == [("cat",), ("dog",)]


def test_load_parallel_empty(tmp_path):
    assert load_parallel(write(tmp_path / "e.jsonl", "")).size() == 0


def test_load_parallel_missing_target(tmp_path):
    f = write(tmp_path / "bad.jsonl", '{"src": ["猫"]}\n')
    with pytest.raises(FormatError, match="line 1: missing target"):
        load_parallel(f)


@pytest.mark.parametrize("line", ["not json", '["list"]', '{"src": [], "tgt": ["x"]}', '{"src": ["a b"], "tgt": ["x"]}'])
def test_load_parallel_malformed_names_line(tmp_path, line):
    f = write(tmp_path / "bad.jsonl", '{"src": ["a"], "tgt": ["b"]}\n' + line + "\n")
    with pytest.raises(FormatError, match="^line 2"):
        load_parallel(f)


def test_parallel_round_trip(tmp_path):
    text = '{"src": ["亚洲", "股市"], "tgt": ["Asian", "stocks"]}\n{"src": ["14"], "tgt": ["14", "percent", "."]}\n'
    f = write(tmp_path / "p.jsonl", text)
    out = tmp_path / "out.jsonl"
    write_parallel(load_parallel(f), out)
    assert out.read_bytes() == text.encode("utf-8")


def test_mined_pairs_round_trip_with_origin(tmp_path):
    from paramine.corpus import ParallelCorpus, SentencePair

    c = ParallelCorpus((SentencePair(src(["a"], "d1", 3), tgt(["b"], "e1", 4), 2),))
    write_parallel(c, tmp_path / "m.jsonl")
    record = json.loads((tmp_path / "m.jsonl").read_text())
    assert record["origin"] == {"mined": 2}
    back = load_parallel(tmp_path / "m.jsonl", keep_origin=True)
    assert back == c
    assert load_parallel(tmp_path / "m.jsonl").pairs[0].mined is None


def _comparable_news_example():
    # 25 source sentences linked to 15 target sentences.
    src_doc = {"doc_id": "xinhua-1", "lang": "src", "sentences": [[f"zh{i}", "。"] for i in range(25)], "links": ["xinhua-1-en"]}
    tgt_doc = {"doc_id": "xinhua-1-en", "lang": "tgt", "sentences": [[f"en{i}", "."] for i in range(15)]}
    return [src_doc, tgt_doc]


def test_load_comparable_counts(tmp_path):
    f = write(tmp_path / "c.jsonl", "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in _comparable_news_example()))
    c = load_comparable(f)
    assert len(c.links) == 1
    assert len(c.source_docs["xinhua-1"]) == 25
    assert len(c.target_docs["xinhua-1-en"]) == 15
    assert [s.index for s in c.source_docs["xinhua-1"]] == list(range(25))


def test_load_comparable_empty(tmp_path):
    c = load_comparable(write(tmp_path / "c.jsonl", ""))
    assert not c.source_docs and not c.target_docs and not c.links


def test_load_comparable_duplicate_doc(tmp_path):
    rec = json.dumps({"doc_id": "a", "lang": "src", "sentences": [["x"]]})
    with pytest.raises(FormatError, match="duplicate doc_id a"):
        load_comparable(write(tmp_path / "c.jsonl", rec + "\n" + rec + "\n"))


def test_same_doc_id_in_both_languages_is_fine(tmp_path):
    recs = [{"doc_id": "a", "lang": "src", "sentences": [["x"]]}, {"doc_id": "a", "lang": "tgt", "sentences": [["y"]]}]
    c = load_comparable(write(tmp_path / "c.jsonl", "\n".join(map(json.dumps, recs))))
    assert set(c.source_docs) == set(c.target_docs) == {"a"}


def test_load_comparable_unknown_link(tmp_path):
    rec = json.dumps({"doc_id": "a", "lang": "src", "sentences": [["x"]], "links": ["nope"]})
    with pytest.raises(FormatError, match="unknown doc_id nope"):
        load_comparable(write(tmp_path / "c.jsonl", rec + "\n"))


def test_load_dictionary(tmp_path):
    d = load_dictionary(write(tmp_path / "d.tsv", "股市\tstocks\tstock market\n猫\tcat\n猫\tkitty\n"))
    assert d.lookup("股市") == ["stocks", "stock market"]
    assert d.lookup("猫") == ["cat", "kitty"]
    assert d.lookup("昨日") == []


def test_load_dictionary_missing_tab(tmp_path):
    with pytest.raises(FormatError, match="line 2"):
        load_dictionary(write(tmp_path / "d.tsv", "猫\tcat\nbroken line\n"))


@given(st.text())
def test_dictionary_lookup_is_total(s):
    d = BilingualDictionary({"猫": ["cat"]})
    assert isinstance(d.lookup(s), list)


@pytest.mark.parametrize("tok", ["14", "1,100", "10%", "3.5", "-2", "２０"])
def test_numbers(tok):
    assert is_number(tok)


@pytest.mark.parametrize("tok", ["", "%", "14th", "fourteen", ".,"])
def test_not_numbers(tok):
    assert not is_number(tok)


def test_proper_noun_flags_target_only():
    t = tgt(["Investors", "in", "Japan", "bought"])
    assert t.propn == (False, False, True, False)
    assert src(["Investors", "in", "Japan"]).propn == (False, False, False)
    assert tgt(["up", "14", "%"]).numbers == (False, True, False)


@pytest.mark.parametrize("tokens", [[], [""], ["a b"], ["a\tb"]])
def test_sentence_token_discipline(tokens):
    with pytest.raises(ValueError):
        Sentence(tuple(tokens), "src", "d", 0)


token = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1).filter(lambda t: not any(c.isspace() for c in t))


@given(st.lists(token, min_size=1, max_size=10))
def test_join_resplit_is_identity(tokens):
    s = Sentence(tuple(tokens), "tgt", "d", 0)
    assert tuple(" ".join(s.tokens).split()) == s.tokens
