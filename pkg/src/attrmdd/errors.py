"""Exception taxonomy shared across the package.

Input problems subclass ValueError so callers that only know sklearn-style
validation conventions can still catch them generically.
"""


class AttrMddError(Exception):
    """Base class for all package-specific errors."""


class MissingPhoneme(AttrMddError, ValueError):
    """A required phoneme row is absent from an attribute table."""


class DuplicateSignature(AttrMddError, ValueError):
    """Two phonemes share one attribute signature."""


class UnknownAttribute(AttrMddError, ValueError):
    """An attribute name is not part of the 35-attribute inventory."""


class UnknownPhoneme(AttrMddError, ValueError):
    """A symbol is not a member of the 39-phoneme set."""


class BadDimension(AttrMddError, ValueError):
    """A matrix or table has the wrong shape."""


class DimensionMismatch(AttrMddError, ValueError):
    """Two array arguments disagree on a shared dimension."""


class InfeasibleTarget(AttrMddError, ValueError):
    """The target sequence cannot be produced from the given frame count."""

    def __init__(self, message, category=None):
        super().__init__(message)
        self.category = category


class NonFiniteLogit(AttrMddError, ValueError):
    """A logit matrix contains NaN or infinity."""


class TooLarge(AttrMddError, ValueError):
    """The exhaustive path enumeration would exceed its size guard."""


class LayoutMismatch(AttrMddError, ValueError):
    """A category layout does not match the logits it is applied to."""


class DuplicateAttribute(AttrMddError, ValueError):
    """The same attribute appears twice when building a layout."""


class AlphabetMismatch(AttrMddError, ValueError):
    """Two token sequences from different alphabets were combined."""


class EmptyCanonical(AttrMddError, ValueError):
    """MDD classification needs a non-empty canonical sequence."""


class EmptyReference(AttrMddError, ValueError):
    """An error rate against an empty reference is undefined."""


class BadConfig(AttrMddError, ValueError):
    """A configuration value is out of range."""


class DivergedLoss(AttrMddError, RuntimeError):
    """Training encountered a non-finite loss."""
