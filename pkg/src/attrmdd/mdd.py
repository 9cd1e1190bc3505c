"""Mispronunciation detection and diagnosis scoring.

Each utterance carries three sequences over one alphabet: the canonical
(prompted) pronunciation, the annotated (actually produced) pronunciation,
and the recognized (system output) pronunciation.  Two pairwise alignments,
both anchored on the canonical sequence, are joined per canonical position
to classify it:

    pronounced correctly, recognized as canonical   -> true acceptance
    pronounced correctly, recognized otherwise      -> false rejection
    mispronounced, recognized as canonical          -> false acceptance
    mispronounced, recognized otherwise             -> true rejection,
        split into correct diagnosis (recognized token equals the annotated
        one, including the both-deleted case) or diagnosis error.

Tokens on the annotated/recognized side that align to no canonical position
are insertions; they are tallied separately and never enter the four counts.
Rates: FAR = FA/(FA+CD+DE), FRR = FR/(FR+TA), DER = DE/(CD+DE), each as a
percentage, with zero denominators reported as undefined rather than zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .alignment import DELETE, INSERT, align
from .errors import AlphabetMismatch, EmptyCanonical, EmptyReference
from .inventory import (
    Attribute,
    attribute,
    attribute_alphabet,
    negative_token,
    phonemes_to_attribute_sequence,
    positive_token,
    signature_diff,
)

#: Serialized stand-in for a rate whose denominator is zero.
UNDEFINED = "NA"


@dataclass(frozen=True)
class AnnotatedUtterance:
    """Canonical, annotated, and recognized sequences over one alphabet."""

    canonical: TokenSequence
    annotated: TokenSequence
    recognized: TokenSequence

    def __post_init__(self):
        ids = {
            self.canonical.alphabet_id,
            self.annotated.alphabet_id,
            self.recognized.alphabet_id,
        }
        if len(ids) != 1:
            raise AlphabetMismatch(
                f"utterance mixes alphabets: {', '.join(sorted(ids))}"
            )


@dataclass(frozen=True)
class MddCounts:
    """Per-canonical-position decision tallies plus insertion side channels."""

    ta: int = 0
    fr: int = 0
    fa: int = 0
    cd: int = 0
    de: int = 0
    annotated_insertions: int = 0
    recognized_insertions: int = 0

    @property
    def tr(self):
        return self.cd + self.de

    @property
    def positions(self):
        return self.ta + self.fr + self.fa + self.cd + self.de

    def __add__(self, other):
        return MddCounts(
            ta=self.ta + other.ta,
            fr=self.fr + other.fr,
            fa=self.fa + other.fa,
            cd=self.cd + other.cd,
            de=self.de + other.de,
            annotated_insertions=self.annotated_insertions
            + other.annotated_insertions,
            recognized_insertions=self.recognized_insertions
            + other.recognized_insertions,
        )

    def to_dict(self):
        return {
            "TA": self.ta,
            "FR": self.fr,
            "FA": self.fa,
            "TR": self.tr,
            "CD": self.cd,
            "DE": self.de,
            "annotated_insertions": self.annotated_insertions,
            "recognized_insertions": self.recognized_insertions,
        }


@dataclass(frozen=True)
class MddRates:
    """FAR/FRR/DER percentages; None marks an undefined (0/0) rate."""

    far: object
    frr: object
    der: object

    def to_dict(self):
        out = {}
        for key, value in (("FAR", self.far), ("FRR", self.frr), ("DER", self.der)):
            out[key] = UNDEFINED if value is None else value
        return out


def _tokens_per_canonical_position(canonical, other):
    """Align and join: the other-side token at each canonical position.

    Returns (tokens, insertions) where tokens[k] is the aligned token of
    canonical position k (None when that position was deleted on the other
    side) and insertions counts other-side tokens aligned to no position.
    """
    alignment = align(canonical, other)
    tokens = []
    insertions = 0
    for op in alignment.ops:
        if op.op == INSERT:
            insertions += 1
        elif op.op == DELETE:
            tokens.append(None)
        else:
            tokens.append(op.hyp_token)
    return tokens, insertions


def classify_positions(u):
    """Classify every canonical position of one utterance into MddCounts."""
    if len(u.canonical) == 0:
        raise EmptyCanonical("cannot classify positions of an empty canonical")
    pronounced, ann_ins = _tokens_per_canonical_position(u.canonical, u.annotated)
    recognized, rec_ins = _tokens_per_canonical_position(u.canonical, u.recognized)

    ta = fr = fa = cd = de = 0
    for want, said, heard in zip(u.canonical.tokens, pronounced, recognized):
        correct = said == want
        accepted = heard == want
        if correct and accepted:
            ta += 1
        elif correct:
            fr += 1
        elif accepted:
            fa += 1
        elif heard == said:
            cd += 1
        else:
            de += 1
    return MddCounts(
        ta=ta,
        fr=fr,
        fa=fa,
        cd=cd,
        de=de,
        annotated_insertions=ann_ins,
        recognized_insertions=rec_ins,
    )


def compute_rates(counts):
    """FAR/FRR/DER percentages from the tallies; 0/0 yields None."""

    def ratio(num, den):
        return 100.0 * num / den if den else None

    return MddRates(
        far=ratio(counts.fa, counts.fa + counts.cd + counts.de),
        frr=ratio(counts.fr, counts.fr + counts.ta),
        der=ratio(counts.de, counts.cd + counts.de),
    )


def attribute_level_mdd(table, u_phoneme, attr, recognized=None):
    """Score one attribute's detector against a phoneme-level utterance.

    The canonical and annotated phoneme sequences are decomposed into the
    attribute's +att/-att sequences; ``recognized`` is the decoded attribute
    sequence, or None to derive it from the utterance's recognized phonemes.
    A substitution that leaves the attribute's bit unchanged is therefore a
    correct pronunciation as far as this attribute is concerned.
    """
    if not isinstance(attr, Attribute):
        attr = attribute(attr)
    canonical = phonemes_to_attribute_sequence(table, attr, u_phoneme.canonical)
    annotated = phonemes_to_attribute_sequence(table, attr, u_phoneme.annotated)
    if recognized is None:
        recognized = phonemes_to_attribute_sequence(
            table, attr, u_phoneme.recognized
        )
    elif recognized.alphabet_id != attribute_alphabet(attr.name):
        raise AlphabetMismatch(
            f"recognized sequence is over {recognized.alphabet_id!r}, "
            f"expected {attribute_alphabet(attr.name)!r}"
        )
    return classify_positions(
        AnnotatedUtterance(
            canonical=canonical, annotated=annotated, recognized=recognized
        )
    )


def attribute_error_rate(ref, hyp):
    """Percentage edit-distance error rate: 100 * (S+D+I) / len(ref)."""
    if len(ref) == 0:
        raise EmptyReference("error rate needs a non-empty reference")
    return 100.0 * align(ref, hyp).distance / len(ref)


def attribute_accuracy(ref, hyp):
    """100 minus the error rate (can go negative when insertions abound)."""
    return 100.0 - attribute_error_rate(ref, hyp)


def prf_counts(ref, hyp):
    """(TP, FP, FN) over +att emissions from the token alignment.

    A matched +att pair is a true positive; a hypothesis +att aligned to
    -att or inserted is a false positive; a reference +att aligned to -att
    or deleted is a false negative.
    """
    alignment = align(ref, hyp)
    tp = fp = fn = 0
    for op in alignment.ops:
        ref_pos = op.ref_token is not None and op.ref_token.startswith("+")
        hyp_pos = op.hyp_token is not None and op.hyp_token.startswith("+")
        if ref_pos and hyp_pos:
            tp += 1
        else:
            if hyp_pos:
                fp += 1
            if ref_pos:
                fn += 1
    return tp, fp, fn


def prf_from_counts(tp, fp, fn):
    """Precision/recall/F1 ratios; None marks an undefined (0/0) value."""
    pre = tp / (tp + fp) if tp + fp else None
    rec = tp / (tp + fn) if tp + fn else None
    if pre is None or rec is None or pre + rec == 0:
        f1 = None
    else:
        f1 = 2 * pre * rec / (pre + rec)
    return pre, rec, f1


def attribute_prf(ref, hyp):
    """Token-level (precision, recall, F1) for one sequence pair."""
    return prf_from_counts(*prf_counts(ref, hyp))


@dataclass(frozen=True)
class PositionDiagnosis:
    """Attribute mismatches detected at one canonical position."""

    position: int
    phoneme: str
    mismatches: tuple  # of (attribute name, expected token, detected token)


@dataclass(frozen=True)
class DiagnosisReport:
    """Per-position attribute feedback for one utterance."""

    entries: tuple = field(default=())

    def to_text(self):
        lines = []
        for e in self.entries:
            detail = ", ".join(
                f"expected {exp}, detected {det if det is not None else 'nothing'}"
                for _, exp, det in e.mismatches
            )
            names = "/".join(name for name, _, _ in e.mismatches)
            lines.append(
                f"position {e.position} (/{e.phoneme}/): {names}: {detail}"
            )
        return "\n".join(lines)

    def to_dict(self):
        return {
            "entries": [
                {
                    "position": e.position,
                    "phoneme": e.phoneme,
                    "mismatches": [
                        {
                            "attribute": name,
                            "expected": exp,
                            "detected": det,
                        }
                        for name, exp, det in e.mismatches
                    ],
                }
                for e in self.entries
            ]
        }


def diagnosis_report(table, u_phoneme, recognized_attr_sequences):
    """Flag, per canonical position, every attribute detected off-target.

    ``recognized_attr_sequences`` are the decoded sequences in the table's
    attribute order.  Each is joined to the canonical positions through its
    own alignment; a position enters the report when at least one attribute's
    detected token differs from the canonical signature's expectation.
    """
    names = table.attribute_names
    if len(recognized_attr_sequences) != len(names):
        raise AlphabetMismatch(
            f"need {len(names)} decoded sequences, got "
            f"{len(recognized_attr_sequences)}"
        )
    canonical = u_phoneme.canonical
    detected_per_attr = []
    for name, seq in zip(names, recognized_attr_sequences):
        ref = phonemes_to_attribute_sequence(table, name, canonical)
        tokens, _ = _tokens_per_canonical_position(ref, seq)
        detected_per_attr.append((name, ref.tokens, tokens))

    entries = []
    for k, ph in enumerate(canonical.tokens):
        mismatches = tuple(
            (name, expected[k], detected[k])
            for name, expected, detected in detected_per_attr
            if detected[k] != expected[k]
        )
        if mismatches:
            entries.append(
                PositionDiagnosis(position=k, phoneme=ph, mismatches=mismatches)
            )
    return DiagnosisReport(entries=tuple(entries))


def expected_attribute_changes(table, canonical_phoneme, produced_phoneme):
    """The attribute tokens a listener should hear flip for one substitution."""

    def token(name, bit):
        return positive_token(name) if bit else negative_token(name)

    return [
        (a.name, token(a.name, bit_a), token(a.name, bit_b))
        for a, bit_a, bit_b in signature_diff(
            table, canonical_phoneme, produced_phoneme
        )
    ]
