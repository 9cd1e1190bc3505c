"""Round trips and validation for every on-disk format."""

from __future__ import annotations

import numpy as np
import pytest

from attrmdd import BadDimension, TokenSequence, UnknownPhoneme, generate_corpus
from attrmdd.fileio import (
    format_decoded_attributes,
    format_decoded_phonemes,
    format_evaluation_line,
    load_checkpoint,
    load_corpus,
    parse_decoded_attributes,
    parse_evaluation_line,
    read_evaluation_file,
    read_logits_csv,
    save_checkpoint,
    save_corpus,
    write_logits_csv,
)
from attrmdd.inventory import attribute_alphabet, phoneme_sequence


def test_logits_csv_round_trips_bit_exactly(tmp_path):
    rng = np.random.default_rng(0)
    logits = rng.normal(size=(7, 5)) * np.pi
    path = tmp_path / "logits.csv"
    write_logits_csv(path, logits)
    again = read_logits_csv(path)
    assert again.shape == logits.shape
    assert np.array_equal(again, logits)  # repr round-trips doubles exactly


def test_logits_csv_is_deterministic(tmp_path):
    logits = np.array([[0.1, -2.5], [1e-17, 3.0]])
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_logits_csv(a, logits)
    write_logits_csv(b, logits)
    assert a.read_bytes() == b.read_bytes()


def test_logits_csv_rejects_malformed_files(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("2,2\n1.0,2.0\n")  # promises 2 rows, has 1
    with pytest.raises(BadDimension):
        read_logits_csv(path)
    path.write_text("2\n1.0\n2.0\n")
    with pytest.raises(BadDimension):
        read_logits_csv(path)
    path.write_text("1,2\n1.0,banana\n")
    with pytest.raises(BadDimension):
        read_logits_csv(path)
    path.write_text("")
    with pytest.raises(BadDimension):
        read_logits_csv(path)
    with pytest.raises(BadDimension):
        write_logits_csv(tmp_path / "c.csv", np.zeros(3))


def test_evaluation_line_round_trip():
    u = parse_evaluation_line("th ih s|s ih s|s ih s")
    assert u.canonical.tokens == ("th", "ih", "s")
    assert u.annotated.tokens == ("s", "ih", "s")
    assert format_evaluation_line(u) == "th ih s|s ih s|s ih s"
    with pytest.raises(BadDimension):
        parse_evaluation_line("th ih s|s ih s")
    with pytest.raises(UnknownPhoneme):
        parse_evaluation_line("th ih s|q ih s|s ih s")


def test_evaluation_file_skips_comments_and_blanks(tmp_path):
    path = tmp_path / "eval.txt"
    path.write_text(
        "# header comment\n"
        "th ih s|s ih s|s ih s\n"
        "\n"
        "z uw|s uw|s uw\n"
    )
    utterances = read_evaluation_file(path)
    assert len(utterances) == 2
    assert utterances[1].canonical.tokens == ("z", "uw")


def test_decoded_attribute_round_trip():
    sequences = [
        TokenSequence(attribute_alphabet("voiced"), ("+voiced", "-voiced")),
        TokenSequence(attribute_alphabet("nasal"), ()),
    ]
    text = format_decoded_attributes(sequences)
    assert text == "voiced\t+voiced -voiced\nnasal\t\n"
    again = parse_decoded_attributes(text)
    assert [s.alphabet_id for s in again] == [s.alphabet_id for s in sequences]
    assert [s.tokens for s in again] == [s.tokens for s in sequences]


def test_decoded_phoneme_format():
    assert format_decoded_phonemes(phoneme_sequence("dh eh r")) == "dh eh r\n"
    assert format_decoded_phonemes(phoneme_sequence([])) == "\n"


def test_corpus_round_trip(tmp_path):
    corpus = generate_corpus(seed=3, n_utterances=4, feature_dim=8)
    directory = tmp_path / "corpus"
    save_corpus(directory, corpus)
    loaded = load_corpus(directory)
    assert len(loaded) == 4
    for utt, (features, phonemes) in zip(corpus.utterances, loaded):
        assert np.array_equal(features, utt.features)
        assert phonemes.tokens == utt.phonemes.tokens


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    weights = rng.normal(size=(6, 9))
    bias = rng.normal(size=9)
    path = tmp_path / "model.csv"
    save_checkpoint(path, weights, bias)
    assert path.read_text().splitlines()[0] == "6,9"
    w2, b2 = load_checkpoint(path)
    assert np.array_equal(w2, weights)
    assert np.array_equal(b2, bias)


def test_checkpoint_shape_validation(tmp_path):
    with pytest.raises(BadDimension):
        save_checkpoint(tmp_path / "x.csv", np.zeros((3, 4)), np.zeros(5))
    with pytest.raises(BadDimension):
        save_checkpoint(tmp_path / "x.csv", np.zeros(4), np.zeros(4))
    path = tmp_path / "y.csv"
    path.write_text("")
    with pytest.raises(BadDimension):
        load_checkpoint(path)
    path.write_text("2,2\n1.0,2.0\n3.0,4.0\n")  # body must have F+1 rows
    with pytest.raises(BadDimension):
        load_checkpoint(path)
