"""Phoneme alphabet, speech attribute inventory, and the signature table.

The package works over the 39-symbol reduced English phoneme set (lowercase
ARPAbet, CMU dictionary inventory, with /zh/ kept distinct from /sh/) and a
fixed inventory of 35 binary speech attributes grouped into manners of
articulation, places of articulation, and other phonological features.

Every phoneme maps to a unique 35-bit attribute signature.  The signatures
ship as a versioned TSV data file; :func:`load_attribute_table` validates the
table invariants (coverage, uniqueness, and a handful of linguistically
non-negotiable bits such as /z/ being a voiced alveolar fricative) at load
time so downstream code can trust any table it is handed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources

from .errors import (
    AlphabetMismatch,
    BadDimension,
    DuplicateSignature,
    MissingPhoneme,
    UnknownAttribute,
    UnknownPhoneme,
)

PHONEME_ALPHABET = "phoneme"

#: The 39 phoneme symbols, in canonical (alphabetical) order.
PHONEMES = (
    "aa", "ae", "ah", "ao", "aw", "ay", "b", "ch", "d", "dh", "eh", "er",
    "ey", "f", "g", "hh", "ih", "iy", "jh", "k", "l", "m", "n", "ng", "ow",
    "oy", "p", "r", "s", "sh", "t", "th", "uh", "uw", "v", "w", "y", "z",
    "zh",
)

MANNER_ATTRIBUTES = (
    "consonant", "sonorant", "fricative", "nasal", "stop", "approximant",
    "affricate", "liquid", "vowel", "semivowel", "continuant",
)
PLACE_ATTRIBUTES = (
    "alveolar", "palatal", "dental", "glottal", "labial", "velar", "mid",
    "high", "low", "front", "back", "central", "anterior", "posterior",
    "retroflex", "bilabial", "coronal", "dorsal",
)
OTHER_ATTRIBUTES = ("long", "short", "monophthong", "diphthong", "round", "voiced")

#: All 35 attribute names in canonical order: manners, places, others.
ATTRIBUTE_NAMES = MANNER_ATTRIBUTES + PLACE_ATTRIBUTES + OTHER_ATTRIBUTES

ATTRIBUTE_GROUPS = {
    **{name: "manner" for name in MANNER_ATTRIBUTES},
    **{name: "place" for name in PLACE_ATTRIBUTES},
    **{name: "other" for name in OTHER_ATTRIBUTES},
}


@dataclass(frozen=True)
class Attribute:
    """One binary speech attribute and the group it belongs to."""

    name: str
    group: str

    def __post_init__(self):
        if self.name not in ATTRIBUTE_GROUPS:
            raise UnknownAttribute(f"unknown attribute name: {self.name!r}")
        if self.group != ATTRIBUTE_GROUPS[self.name]:
            raise UnknownAttribute(
                f"attribute {self.name!r} belongs to group "
                f"{ATTRIBUTE_GROUPS[self.name]!r}, not {self.group!r}"
            )


#: The canonical Attribute objects in canonical order.
ATTRIBUTES = tuple(Attribute(name, ATTRIBUTE_GROUPS[name]) for name in ATTRIBUTE_NAMES)


def attribute(name):
    """Return the canonical :class:`Attribute` for ``name``."""
    if name not in ATTRIBUTE_GROUPS:
        raise UnknownAttribute(f"unknown attribute name: {name!r}")
    return ATTRIBUTES[ATTRIBUTE_NAMES.index(name)]


def attribute_alphabet(name):
    """Alphabet id for a single attribute's {+att, -att} token set."""
    return f"attribute:{name}"


def positive_token(name):
    return "+" + name


def negative_token(name):
    return "-" + name


@dataclass(frozen=True)
class TokenSequence:
    """An ordered token sequence tied to a named alphabet.

    Blank is never a member of a TokenSequence; blanks only exist inside raw
    decode paths before collapsing.
    """

    alphabet_id: str
    tokens: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.alphabet_id.startswith("attribute:"):
            name = self.alphabet_id.split(":", 1)[1]
            legal = {positive_token(name), negative_token(name)}
            for tok in self.tokens:
                if tok not in legal:
                    raise AlphabetMismatch(
                        f"token {tok!r} is not in the {self.alphabet_id} alphabet"
                    )

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def phoneme_sequence(tokens):
    """Build a phoneme TokenSequence, lowercasing and validating each symbol.

    Accepts an iterable of symbols or a single space-separated string.
    """
    if isinstance(tokens, str):
        tokens = tokens.split()
    normalized = []
    known = set(PHONEMES)
    for tok in tokens:
        sym = tok.lower()
        if sym not in known:
            raise UnknownPhoneme(f"unknown phoneme symbol: {tok!r}")
        normalized.append(sym)
    return TokenSequence(PHONEME_ALPHABET, tuple(normalized))


@dataclass(frozen=True)
class AttributeTable:
    """Validated phoneme -> 35-bit attribute signature mapping.

    Immutable after construction; all operations on it are pure, so one table
    can be shared freely across threads.
    """

    rows: dict = field(repr=False)
    attribute_order: tuple = ATTRIBUTES
    version: str = "unversioned"

    @property
    def attribute_names(self):
        return tuple(a.name for a in self.attribute_order)

    def signature(self, phoneme):
        """The 35-bit signature tuple for ``phoneme``."""
        sym = phoneme.lower()
        if sym not in self.rows:
            raise UnknownPhoneme(f"unknown phoneme symbol: {phoneme!r}")
        return self.rows[sym]

    def bit(self, phoneme, attr_name):
        """The 0/1 bit of one attribute for one phoneme."""
        if attr_name not in ATTRIBUTE_GROUPS:
            raise UnknownAttribute(f"unknown attribute name: {attr_name!r}")
        return self.signature(phoneme)[self.attribute_names.index(attr_name)]


def _validate_table(rows):
    missing = [p for p in PHONEMES if p not in rows]
    if missing:
        raise MissingPhoneme(f"table is missing phoneme rows: {', '.join(missing)}")
    extras = [p for p in rows if p not in PHONEMES]
    if extras:
        raise UnknownPhoneme(f"table has rows outside the 39-phoneme set: {', '.join(extras)}")

    seen = {}
    for ph, sig in rows.items():
        if sig in seen:
            raise DuplicateSignature(
                f"phonemes {seen[sig]!r} and {ph!r} share one attribute signature"
            )
        seen[sig] = ph

    idx = {name: i for i, name in enumerate(ATTRIBUTE_NAMES)}

    def check(ph, attr_name, expected):
        if rows[ph][idx[attr_name]] != expected:
            sign = "+" if expected else "-"
            raise BadDimension(
                f"table violates a required bit: /{ph}/ must be {sign}{attr_name}"
            )

    # Bits the rest of the pipeline relies on: /z/ is a voiced alveolar
    # fricative and its voiceless twin differs only in voicing; /r/ vs /ah/
    # split on vowel and liquid; voicing separates z/s and jh/ch.
    check("z", "fricative", 1)
    check("z", "voiced", 1)
    check("z", "alveolar", 1)
    check("s", "voiced", 0)
    for attr_name in ("fricative", "alveolar"):
        if rows["s"][idx[attr_name]] != rows["z"][idx[attr_name]]:
            raise BadDimension(
                f"table violates a required bit: /s/ and /z/ must agree on {attr_name}"
            )
    check("r", "vowel", 0)
    check("r", "liquid", 1)
    check("ah", "vowel", 1)
    check("ah", "liquid", 0)
    check("jh", "voiced", 1)
    check("ch", "voiced", 0)


def load_attribute_table(source):
    """Parse and validate an attribute table from TSV text content.

    The format is a header row ``phoneme<TAB>attr1<TAB>...<TAB>attr35``
    followed by one ``symbol<TAB>0|1 x 35`` row per phoneme.  Comment lines
    start with ``#``; a comment containing ``version:`` sets the table's
    version tag.
    """
    version = "unversioned"
    header = None
    rows = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "version:" in line:
                version = line.split("version:", 1)[1].strip().rstrip(",")
            continue
        fields = line.split("\t")
        if header is None:
            header = fields
            if header[0].lower() != "phoneme":
                raise BadDimension("first header column must be 'phoneme'")
            names = tuple(header[1:])
            if len(names) != len(ATTRIBUTE_NAMES):
                raise BadDimension(
                    f"expected {len(ATTRIBUTE_NAMES)} attribute columns, got {len(names)}"
                )
            for name in names:
                if name not in ATTRIBUTE_GROUPS:
                    raise UnknownAttribute(f"unknown attribute column: {name!r}")
            if names != ATTRIBUTE_NAMES:
                raise UnknownAttribute(
                    "attribute columns must appear in canonical inventory order"
                )
            continue
        sym = fields[0].lower()
        if sym in rows:
            raise BadDimension(f"line {lineno}: duplicate row for phoneme {sym!r}")
        bits = fields[1:]
        if len(bits) != len(ATTRIBUTE_NAMES):
            raise BadDimension(
                f"line {lineno}: row {sym!r} has {len(bits)} bits, expected "
                f"{len(ATTRIBUTE_NAMES)}"
            )
        try:
            sig = tuple(int(b) for b in bits)
        except ValueError:
            raise BadDimension(f"line {lineno}: row {sym!r} has a non-integer bit")
        if any(b not in (0, 1) for b in sig):
            raise BadDimension(f"line {lineno}: row {sym!r} has a bit outside 0/1")
        rows[sym] = sig
    if header is None:
        raise BadDimension("attribute table has no header row")
    _validate_table(rows)
    return AttributeTable(rows=rows, attribute_order=ATTRIBUTES, version=version)


def load_attribute_table_path(path):
    """Load and validate an attribute table from a file path."""
    with open(path, encoding="utf-8") as f:
        return load_attribute_table(f.read())


@functools.cache
def builtin_table():
    """The attribute table packaged with the library."""
    text = resources.files("attrmdd.data").joinpath("attribute_table.tsv").read_text("utf-8")
    return load_attribute_table(text)


def phonemes_to_attribute_sequence(table, attr, phonemes):
    """Map a phoneme sequence to one attribute's +att/-att target sequence.

    The output has the same length as the input: position ``t`` is ``+att``
    exactly when the signature of ``phonemes[t]`` has bit 1 for ``attr``.
    """
    name = attr.name if isinstance(attr, Attribute) else attr
    if name not in ATTRIBUTE_GROUPS:
        raise UnknownAttribute(f"unknown attribute name: {name!r}")
    if phonemes.alphabet_id != PHONEME_ALPHABET:
        raise AlphabetMismatch(
            f"expected a phoneme sequence, got alphabet {phonemes.alphabet_id!r}"
        )
    pos, neg = positive_token(name), negative_token(name)
    column = table.attribute_names.index(name)
    tokens = tuple(
        pos if table.signature(ph)[column] else neg for ph in phonemes.tokens
    )
    return TokenSequence(attribute_alphabet(name), tokens)


def signature_diff(table, a, b):
    """Attributes where two phonemes' signatures differ, in canonical order.

    Returns a list of ``(Attribute, bit_a, bit_b)`` triples; empty exactly
    when ``a == b`` (signatures are unique).
    """
    sig_a = table.signature(a)
    sig_b = table.signature(b)
    return [
        (attr_obj, sig_a[i], sig_b[i])
        for i, attr_obj in enumerate(table.attribute_order)
        if sig_a[i] != sig_b[i]
    ]
