"""Tokenizer and sentence splitter behavior."""

import random

import pytest

from udbridge.errors import DataError
from udbridge.tokenizer import TokenizerConfig, tokenize


def forms(doc):
    return [[t.form for t in s.tokens] for s in doc.sentences]


def test_basic_sentence():
    doc = tokenize("De man sjocht.")
    assert forms(doc) == [["De", "man", "sjocht", "."]]
    sent = doc.sentences[0]
    assert sent.tokens[2].misc == "SpaceAfter=No"
    assert sent.tokens[3].misc == "_"
    assert sent.text() == "De man sjocht."


def test_split_requires_uppercase_continuation():
    doc = tokenize("Hy rint. Sy sjocht.")
    assert forms(doc) == [["Hy", "rint", "."], ["Sy", "sjocht", "."]]
    doc = tokenize("hy rint. dan sliept er.")
    assert len(doc.sentences) == 1


def test_abbreviation_keeps_period_and_sentence():
    cfg = TokenizerConfig(abbreviations={"bgl.", "s."})
    doc = tokenize("Hy komt bgl. moarn wer.", cfg)
    assert forms(doc) == [["Hy", "komt", "bgl.", "moarn", "wer", "."]]
    # same text without the abbreviation list: the period splits off,
    # though the sentence only ends if an uppercase letter follows
    doc = tokenize("Hy komt bgl. Moarn wer.", TokenizerConfig())
    assert forms(doc) == [["Hy", "komt", "bgl", "."], ["Moarn", "wer", "."]]


def test_abbreviations_must_end_with_period():
    with pytest.raises(DataError):
        TokenizerConfig(abbreviations={"bgl"})


def test_quotes_and_brackets_are_peeled():
    doc = tokenize("«Goeie», sei er (earlik).")
    assert forms(doc) == [
        ["«", "Goeie", "»", ",", "sei", "er", "(", "earlik", ")", "."]
    ]


def test_ellipsis_and_period_runs():
    doc = tokenize("Ja… No.")
    assert forms(doc) == [["Ja", "…"], ["No", "."]]
    doc = tokenize("Wachtsje... Dan.")
    assert forms(doc) == [["Wachtsje", "..."], ["Dan", "."]]


def test_double_terminators():
    doc = tokenize("Wat?! Echt.")
    assert forms(doc) == [["Wat", "?", "!"], ["Echt", "."]]


def test_interior_punctuation_stays_inside():
    doc = tokenize("It kosten 12.50 euro foar in knap-moaie fyts.")
    assert "12.50" in forms(doc)[0]
    assert "knap-moaie" in forms(doc)[0]


def test_char_spans_point_into_input():
    text = "  «Moai!»  sei  sy. "
    doc = tokenize(text)
    for sent in doc.sentences:
        for tok in sent.tokens:
            begin, end = tok.char_span
            assert text[begin:end] == tok.form


def test_every_nonspace_char_lands_in_exactly_one_token():
    rng = random.Random(7)
    alphabet = "ab ûê .,?!()«»…  AB\n\tc"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        doc = tokenize(text)
        produced = "".join(t.form for s in doc.sentences for t in s.tokens)
        assert produced == "".join(text.split())


def test_empty_and_whitespace_input():
    assert tokenize("").sentences == []
    assert tokenize(" \n\t ").sentences == []


def test_lone_period_chunk_is_a_terminator():
    doc = tokenize("sa . No")
    assert forms(doc) == [["sa", "."], ["No"]]
