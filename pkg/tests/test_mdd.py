"""Mispronunciation detection scoring: position classification, rates, PRF."""

from __future__ import annotations

import numpy as np
import pytest

from attrmdd import (
    AlphabetMismatch,
    AnnotatedUtterance,
    EmptyCanonical,
    EmptyReference,
    MddCounts,
    TokenSequence,
    attribute_accuracy,
    attribute_error_rate,
    attribute_level_mdd,
    attribute_prf,
    classify_positions,
    compute_rates,
    diagnosis_report,
    phoneme_sequence,
    phonemes_to_attribute_sequence,
)
from attrmdd.inventory import ATTRIBUTE_NAMES, attribute_alphabet
from attrmdd.mdd import UNDEFINED, expected_attribute_changes, prf_counts

#: Published aggregate tallies and the rates they must reproduce, as
#: (FA, FR, TA, CD, DE) -> (FRR, FAR, DER) percentages.
RATE_TABLE = [
    ((2686, 2261, 23920, 1077, 497), (8.64, 63.05, 31.58)),
    ((345, 256, 1884, 191, 66), (11.96, 57.31, 25.68)),
    ((1649, 4808, 21300, 1896, 715), (18.42, 38.71, 27.38)),
    ((209, 455, 1649, 264, 129), (21.63, 34.72, 32.82)),
    ((1683, 1899, 24079, 2170, 407), (7.31, 39.51, 15.79)),
    ((155, 268, 1829, 370, 77), (12.78, 25.75, 17.23)),
]


def _utterance(canonical, annotated, recognized):
    return AnnotatedUtterance(
        canonical=phoneme_sequence(canonical),
        annotated=phoneme_sequence(annotated),
        recognized=phoneme_sequence(recognized),
    )


def test_correct_diagnosis_when_recognizer_hears_the_substitution():
    counts = classify_positions(_utterance("th ih s", "s ih s", "s ih s"))
    assert counts.to_dict() == {
        "TA": 2, "FR": 0, "FA": 0, "TR": 1, "CD": 1, "DE": 0,
        "annotated_insertions": 0, "recognized_insertions": 0,
    }


def test_false_acceptance_when_recognizer_hears_the_canonical():
    counts = classify_positions(_utterance("th ih s", "s ih s", "th ih s"))
    assert (counts.ta, counts.fa, counts.cd, counts.de) == (2, 1, 0, 0)


def test_diagnosis_error_when_recognizer_hears_a_third_phoneme():
    counts = classify_positions(_utterance("th ih s", "s ih s", "f ih s"))
    assert (counts.ta, counts.cd, counts.de) == (2, 0, 1)
    assert counts.tr == 1


def test_false_rejection_on_correct_pronunciation():
    counts = classify_positions(_utterance("th ih s", "th ih s", "s ih s"))
    assert (counts.ta, counts.fr, counts.fa) == (2, 1, 0)


def test_deletion_heard_as_deletion_is_correct_diagnosis():
    # Speaker dropped /ih/ and the recognizer also produced nothing there.
    counts = classify_positions(_utterance("s ih s", "s s", "s s"))
    assert counts.cd == 1
    assert counts.de == 0


def test_insertions_stay_out_of_the_position_counts():
    counts = classify_positions(_utterance("s", "s ih", "s"))
    assert counts.positions == 1
    assert counts.ta == 1
    assert counts.annotated_insertions == 1
    assert counts.recognized_insertions == 0

    counts = classify_positions(_utterance("s", "s", "s ih t"))
    assert counts.ta == 1
    assert counts.recognized_insertions == 2


def test_every_canonical_position_is_classified_exactly_once():
    rng = np.random.default_rng(0)
    pool = ["s", "z", "ih", "iy", "t", "d"]
    for _ in range(150):
        canonical = [pool[k] for k in rng.integers(0, 6, size=rng.integers(1, 7))]
        annotated = [pool[k] for k in rng.integers(0, 6, size=rng.integers(0, 7))]
        recognized = [pool[k] for k in rng.integers(0, 6, size=rng.integers(0, 7))]
        counts = classify_positions(_utterance(canonical, annotated, recognized))
        assert counts.positions == len(canonical)


def test_perfect_speaker_and_recognizer_yield_only_true_acceptances():
    rng = np.random.default_rng(1)
    pool = ["s", "z", "ih", "t"]
    for _ in range(50):
        seq = [pool[k] for k in rng.integers(0, 4, size=rng.integers(1, 8))]
        counts = classify_positions(_utterance(seq, seq, seq))
        assert counts.ta == len(seq)
        assert counts.positions == counts.ta


def test_correct_speech_never_produces_fa_cd_or_de():
    rng = np.random.default_rng(2)
    pool = ["s", "z", "ih", "t"]
    for _ in range(50):
        seq = [pool[k] for k in rng.integers(0, 4, size=rng.integers(1, 8))]
        heard = [pool[k] for k in rng.integers(0, 4, size=rng.integers(0, 8))]
        counts = classify_positions(_utterance(seq, seq, heard))
        assert counts.fa == 0 and counts.cd == 0 and counts.de == 0
        assert counts.ta + counts.fr == len(seq)


def test_empty_canonical_is_rejected():
    with pytest.raises(EmptyCanonical):
        classify_positions(_utterance([], ["s"], ["s"]))


def test_counts_add_componentwise():
    a = MddCounts(ta=1, fr=2, fa=3, cd=4, de=5, annotated_insertions=6,
                  recognized_insertions=7)
    b = MddCounts(ta=10, fr=20, fa=30, cd=40, de=50, annotated_insertions=60,
                  recognized_insertions=70)
    total = a + b
    assert total == MddCounts(11, 22, 33, 44, 55, 66, 77)
    assert total.tr == 44 + 55


@pytest.mark.parametrize("tallies,expected", RATE_TABLE)
def test_published_tallies_reproduce_their_rates(tallies, expected):
    fa, fr, ta, cd, de = tallies
    rates = compute_rates(MddCounts(ta=ta, fr=fr, fa=fa, cd=cd, de=de))
    frr, far, der = expected
    assert rates.frr == pytest.approx(frr, abs=0.01)
    assert rates.far == pytest.approx(far, abs=0.01)
    assert rates.der == pytest.approx(der, abs=0.01)


def test_zero_denominators_are_undefined_not_zero():
    rates = compute_rates(MddCounts(ta=0, fr=0, fa=0, cd=0, de=0))
    assert rates.far is None and rates.frr is None and rates.der is None
    assert rates.to_dict() == {"FAR": UNDEFINED, "FRR": UNDEFINED, "DER": UNDEFINED}
    only_ta = compute_rates(MddCounts(ta=5))
    assert only_ta.frr == 0.0
    assert only_ta.far is None and only_ta.der is None


def test_voicing_substitution_flags_only_the_voiced_detector(table):
    u = _utterance("s ih s", "z ih s", "z ih s")
    for name in ATTRIBUTE_NAMES:
        counts = attribute_level_mdd(table, u, name)
        if name == "voiced":
            assert (counts.ta, counts.cd, counts.fa, counts.de) == (2, 1, 0, 0)
        else:
            assert counts.ta == 3
            assert counts.positions == 3


def test_attribute_level_accepts_decoded_sequences(table):
    u = _utterance("s ih s", "z ih s", "s ih s")
    decoded = phonemes_to_attribute_sequence(table, "voiced", phoneme_sequence("z ih s"))
    counts = attribute_level_mdd(table, u, "voiced", recognized=decoded)
    assert counts.cd == 1
    with pytest.raises(AlphabetMismatch):
        attribute_level_mdd(
            table, u, "voiced",
            recognized=TokenSequence(attribute_alphabet("nasal"), ("+nasal",)),
        )


def test_attribute_error_rate_and_accuracy():
    ref = TokenSequence("token", tuple("aab"))
    hyp = TokenSequence("token", tuple("ab"))
    assert attribute_error_rate(ref, hyp) == pytest.approx(100.0 / 3.0)
    assert attribute_error_rate(ref, ref) == 0.0
    assert attribute_error_rate(ref, TokenSequence("token", ())) == 100.0
    assert attribute_accuracy(ref, hyp) == pytest.approx(100.0 - 100.0 / 3.0)
    with pytest.raises(EmptyReference):
        attribute_error_rate(TokenSequence("token", ()), hyp)


def test_error_rate_can_exceed_100_under_heavy_insertion():
    ref = TokenSequence("token", tuple("a"))
    hyp = TokenSequence("token", tuple("abb"))
    assert attribute_error_rate(ref, hyp) == 200.0
    assert attribute_accuracy(ref, hyp) == -100.0


def test_prf_counts_and_ratios():
    alpha = attribute_alphabet("voiced")
    ref = TokenSequence(alpha, ("+voiced", "-voiced", "+voiced"))
    hyp = TokenSequence(alpha, ("+voiced", "-voiced", "-voiced"))
    assert prf_counts(ref, hyp) == (1, 0, 1)
    pre, rec, f1 = attribute_prf(ref, hyp)
    assert (pre, rec) == (1.0, 0.5)
    assert f1 == pytest.approx(2.0 / 3.0)

    perfect = attribute_prf(ref, ref)
    assert perfect == (1.0, 1.0, 1.0)

    silent = TokenSequence(alpha, ("-voiced",) * 3)
    pre, rec, f1 = attribute_prf(ref, silent)
    assert pre is None and rec == 0.0 and f1 is None


def test_prf_counts_insertions_and_deletions():
    alpha = attribute_alphabet("voiced")
    ref = TokenSequence(alpha, ("+voiced",))
    hyp = TokenSequence(alpha, ("+voiced", "+voiced"))
    assert prf_counts(ref, hyp) == (1, 1, 0)  # extra +att is a false positive
    assert prf_counts(hyp, ref) == (1, 0, 1)  # dropped +att is a false negative
    assert prf_counts(ref, TokenSequence(alpha, ())) == (0, 0, 1)


def test_diagnosis_report_flags_flipped_attributes(table):
    canonical = phoneme_sequence("z ih r")
    produced = phoneme_sequence("s ih r")
    decoded = [
        phonemes_to_attribute_sequence(table, name, produced)
        for name in table.attribute_names
    ]
    u = AnnotatedUtterance(canonical=canonical, annotated=produced, recognized=produced)
    report = diagnosis_report(table, u, decoded)
    assert len(report.entries) == 1
    entry = report.entries[0]
    assert entry.position == 0 and entry.phoneme == "z"
    assert entry.mismatches == (("voiced", "+voiced", "-voiced"),)
    assert "position 0 (/z/): voiced: expected +voiced, detected -voiced" in report.to_text()


def test_diagnosis_report_empty_for_on_target_decodes(table):
    canonical = phoneme_sequence("dh eh r")
    decoded = [
        phonemes_to_attribute_sequence(table, name, canonical)
        for name in table.attribute_names
    ]
    u = AnnotatedUtterance(canonical=canonical, annotated=canonical, recognized=canonical)
    report = diagnosis_report(table, u, decoded)
    assert report.entries == ()
    assert report.to_text() == ""
    assert report.to_dict() == {"entries": []}
    with pytest.raises(AlphabetMismatch):
        diagnosis_report(table, u, decoded[:-1])


def test_diagnosis_report_marks_deleted_detections(table):
    canonical = phoneme_sequence("z")
    decoded = [
        TokenSequence(attribute_alphabet(name), ())
        for name in table.attribute_names
    ]
    u = AnnotatedUtterance(canonical=canonical, annotated=canonical, recognized=canonical)
    report = diagnosis_report(table, u, decoded)
    assert len(report.entries) == 1
    assert all(det is None for _, _, det in report.entries[0].mismatches)
    assert "detected nothing" in report.to_text()


def test_expected_attribute_changes_mirror_the_signature_diff(table):
    changes = expected_attribute_changes(table, "s", "z")
    assert changes == [("voiced", "-voiced", "+voiced")]
    assert expected_attribute_changes(table, "s", "s") == []
    names = {name for name, _, _ in expected_attribute_changes(table, "r", "ah")}
    assert {"vowel", "liquid"} <= names


def test_utterance_rejects_mixed_alphabets():
    with pytest.raises(AlphabetMismatch):
        AnnotatedUtterance(
            canonical=phoneme_sequence("s"),
            annotated=phoneme_sequence("s"),
            recognized=TokenSequence("token", ("s",)),
        )
