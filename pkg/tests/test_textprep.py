import re
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from kgrec.porter import stem_word
from kgrec.textprep import (Part, Tag, default_stoplist, load_stoplist, pos_tag, preprocess,
                            remove_stopwords, stem, tokenize)

CORPUS_TEXT = "\n".join(
    p.read_text(encoding="utf-8") for p in sorted((Path(__file__).parent / "fixtures").rglob("*.csv")))


@pytest.mark.parametrize("text, expected", [
    ("Short-text, Tracing!", ["short-text", "tracing"]),
    ("", []),
    ("IR & ML 2020", ["ir", "ml", "2020"]),
    ("a--b -c d-", ["a", "b", "c", "d"]),
    ("under_score", ["under", "score"]),
])
def test_tokenize(text, expected):
    assert tokenize(text) == expected


def test_remove_stopwords():
    stop = default_stoplist()
    assert remove_stopwords(["the", "topic", "model"], stop) == ["topic", "model"]
    assert remove_stopwords(["the", "of", "and"], stop) == []
    assert remove_stopwords([], stop) == []


def test_default_stoplist_size():
    assert 170 <= len(default_stoplist()) <= 180


def test_stoplist_file_with_comments(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# header\nfoo\nBar  # trailing\n\n", encoding="utf-8")
    assert load_stoplist(path) == {"foo", "bar"}


@pytest.mark.parametrize("tokens, expected", [
    (["quickly"], [("quickly", Tag.ADV)]),
    (["2020"], [("2020", Tag.NUM)]),
    (["zzqx"], [("zzqx", Tag.NOUN)]),
    (["optimize", "effective"], [("optimize", Tag.VERB), ("effective", Tag.ADJ)]),
])
def test_pos_tag(tokens, expected):
    assert pos_tag(tokens) == expected


def test_stem_examples():
    assert stem(["traceability", "caresses", "sky"]) == ["traceabl", "caress", "sky"]


def porter_oracle():
    nltk_porter = pytest.importorskip("nltk.stem.porter")
    return nltk_porter.PorterStemmer(mode=nltk_porter.PorterStemmer.ORIGINAL_ALGORITHM)


VOCAB_SAMPLE = sorted(set(re.findall(r"[a-z]+", CORPUS_TEXT.lower())) | {
    "caresses", "ponies", "ties", "caress", "cats", "feed", "agreed", "plastered", "bled",
    "motoring", "sing", "conflated", "troubled", "sized", "hopping", "tanned", "falling",
    "hissing", "fizzed", "failing", "filing", "happy", "relational", "conditional",
    "rational", "valenci", "hesitanci", "digitizer", "conformabli", "radicalli",
    "differentli", "vileli", "analogousli", "vietnamization", "predication", "operator",
    "feudalism", "decisiveness", "hopefulness", "callousness", "formaliti", "sensitiviti",
    "sensibiliti", "triplicate", "formative", "formalize", "electriciti", "electrical",
    "hopeful", "goodness", "revival", "allowance", "inference", "airliner", "gyroscopic",
    "adjustable", "defensible", "irritant", "replacement", "adjustment", "dependent",
    "adoption", "homologou", "communism", "activate", "angulariti", "homologous",
    "effective", "bowdlerize", "probate", "rate", "cease", "controll", "roll", "generalizations",
})


def test_porter_matches_reference_implementation():
    oracle = porter_oracle()
    mismatches = [(w, stem_word(w), oracle.stem(w)) for w in VOCAB_SAMPLE
                  if stem_word(w) != oracle.stem(w)]
    assert not mismatches


@given(st.text(st.sampled_from("abcdefghijklmnopqrstuvwxyz"), min_size=1, max_size=15))
def test_porter_matches_reference_on_random_words(word):
    assert stem_word(word) == porter_oracle().stem(word)


def test_preprocess_example():
    doc = preprocess("d1", "p1", "The topic models")
    assert doc.pairs == (("topic", Tag.NOUN), ("model", Tag.NOUN))
    assert doc.part is Part.P1


@pytest.mark.parametrize("text", ["", "the of and it"])
def test_preprocess_degenerate(text):
    assert preprocess("d", "p2", text).pairs == ()


def test_stemmed_stopword_is_dropped():
    assert "do" in default_stoplist()
    assert preprocess("d", "p1", "doing research").tokens == ["research"]


LEXICON = [line for line in (Path(__file__).parent / "fixtures" / "lexicon.txt").read_text().splitlines()
           if line and not line.startswith("#")]


def test_stemming_is_fixed_point_on_test_lexicon():
    assert len(LEXICON) > 100
    assert stem(LEXICON) == LEXICON
    assert preprocess("c", "p2", " ".join(LEXICON)).tokens == LEXICON


@pytest.mark.parametrize("word, once, twice", [
    ("proposes", "propos", "propo"),
    ("sparse", "spars", "spar"),
])
def test_porter_is_not_idempotent_in_general(word, once, twice):
    assert stem_word(word) == once
    assert stem_word(once) == twice


def test_preprocess_deterministic():
    a = preprocess("c", "p2", CORPUS_TEXT)
    assert a == preprocess("c", "p2", CORPUS_TEXT)


@given(st.text())
def test_processed_doc_invariants_on_arbitrary_text(text):
    stop = default_stoplist()
    doc = preprocess("x", "target_text", text)
    for token, tag in doc.pairs:
        assert token
        assert token == token.lower()
        assert not any(ch.isspace() for ch in token)
        assert token not in stop
        assert isinstance(tag, Tag)


@given(st.lists(st.sampled_from(["model", "the", "tracing", "quickly", "2020", "of", "links"])))
def test_stages_never_reorder(tokens):
    stop = default_stoplist()
    kept = remove_stopwords(tokens, stop)
    assert kept == [t for t in tokens if t not in stop]
    assert [t for t, _ in pos_tag(kept)] == kept
    assert len(stem(kept)) == len(kept)
