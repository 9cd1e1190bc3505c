"""Greedy best-path decoding.

Per category: frame-wise argmax over the grouped {+att, -att, blank} triple,
then merge adjacent repeats and drop blanks.  Ties resolve toward the lowest
column index, so decoding is a pure deterministic function of the logits.
"""

from __future__ import annotations

import numpy as np

from .ctc import collapse
from .errors import BadDimension, LayoutMismatch
from .inventory import (
    PHONEME_ALPHABET,
    PHONEMES,
    TokenSequence,
    attribute_alphabet,
    negative_token,
    positive_token,
)
from .sctc import PLUS, MINUS, TRIPLE_BLANK
from .validation import check_logits


def _category_tokens(name):
    return positive_token(name), negative_token(name)


def greedy_decode_category(logits, layout, category_index):
    """Decode one category's +att/-att sequence from T x width logits."""
    if not 0 <= category_index < layout.n_categories:
        raise LayoutMismatch(
            f"category index {category_index} outside [0, {layout.n_categories})"
        )
    logits = check_logits(logits, n_columns=layout.width)
    p_idx, m_idx = layout.categories[category_index]
    # Softmax is monotone within the triple, so the raw-logit argmax matches
    # the grouped-softmax argmax, ties included (order plus, minus, blank).
    triple = logits[:, [p_idx, m_idx, layout.blank_index]]
    best = np.argmax(triple, axis=1)
    name = layout.names[category_index]
    plus, minus = _category_tokens(name)
    classes = {PLUS: plus, MINUS: minus, TRIPLE_BLANK: None}
    path = [classes[c] for c in best]
    return TokenSequence(attribute_alphabet(name), collapse(path, None))


def decode_all(logits, layout):
    """Decode every category; returns one TokenSequence per category in order.

    The argmax is taken over each category's three raw logits; softmax is
    monotone per triple, so this equals the grouped-softmax argmax.
    """
    logits = check_logits(logits, n_columns=layout.width)
    t_len = logits.shape[0]
    triples = np.empty((layout.n_categories, t_len, 3))
    triples[:, :, PLUS] = logits[:, layout.plus_indices].T
    triples[:, :, MINUS] = logits[:, layout.minus_indices].T
    triples[:, :, TRIPLE_BLANK] = logits[:, layout.blank_index][None, :]
    # Class axis order is (PLUS, MINUS, TRIPLE_BLANK); np.argmax already
    # breaks ties toward the lowest index, which is the required order.
    best = np.argmax(triples, axis=2)
    out = []
    for i, name in enumerate(layout.names):
        plus, minus = _category_tokens(name)
        classes = {PLUS: plus, MINUS: minus, TRIPLE_BLANK: None}
        path = [classes[c] for c in best[i]]
        out.append(TokenSequence(attribute_alphabet(name), collapse(path, None)))
    return out


def greedy_decode_phoneme(logits, phonemes=PHONEMES):
    """Decode a phoneme sequence from T x (|P|+1) logits, blank last.

    A single softmax group: frame argmax over all columns, then collapse.
    """
    logits = check_logits(logits, n_columns=len(phonemes) + 1)
    blank = len(phonemes)
    best = np.argmax(logits, axis=1)
    path = [None if c == blank else phonemes[c] for c in best]
    return TokenSequence(PHONEME_ALPHABET, collapse(path, None))
