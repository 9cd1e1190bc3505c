"""Multi-label separable CTC with a single shared blank node.

N binary categories (one per speech attribute) share one output matrix of
width 2N+1: a +att node and a -att node per category plus one blank column
that every category normalizes against.  Each category's probabilities are a
softmax over its own triple {+att, -att, blank}; the per-category CTC losses
are summed (the negative log of the product of the category label
probabilities), and the gradient accumulates every category's blank
contribution into the single shared blank column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ctc
from .errors import (
    BadDimension,
    DuplicateAttribute,
    InfeasibleTarget,
    LayoutMismatch,
)
from .inventory import (
    Attribute,
    TokenSequence,
    attribute_alphabet,
    negative_token,
    phonemes_to_attribute_sequence,
    positive_token,
)
from .validation import check_logits, min_path_length

#: Class indices inside one category's {+att, -att, blank} triple.
PLUS, MINUS, TRIPLE_BLANK = 0, 1, 2


@dataclass(frozen=True)
class CategoryLayout:
    """Column assignment for N binary categories plus one shared blank.

    ``categories[i]`` is the (plus_index, minus_index) pair of category i;
    all 2N+1 indices are distinct and cover [0, width).
    """

    categories: tuple
    blank_index: int
    names: tuple = field(default=())

    def __post_init__(self):
        cats = tuple((int(p), int(m)) for p, m in self.categories)
        object.__setattr__(self, "categories", cats)
        names = tuple(self.names) if self.names else tuple(
            f"cat{i}" for i in range(len(cats))
        )
        if len(names) != len(cats):
            raise LayoutMismatch("layout has a name count different from its categories")
        object.__setattr__(self, "names", names)
        used = [i for pair in cats for i in pair] + [self.blank_index]
        if sorted(used) != list(range(len(used))):
            raise LayoutMismatch(
                "layout indices must be distinct and cover [0, width)"
            )

    @property
    def n_categories(self):
        return len(self.categories)

    @property
    def width(self):
        return 2 * len(self.categories) + 1

    @property
    def plus_indices(self):
        return np.asarray([p for p, _ in self.categories], dtype=np.intp)

    @property
    def minus_indices(self):
        return np.asarray([m for _, m in self.categories], dtype=np.intp)


def make_layout(attribute_order):
    """Canonical layout over an attribute ordering.

    Columns [0..N) hold the +att nodes in order, [N..2N) the -att nodes in
    the same order, and column 2N is the shared blank.  For the 35-attribute
    inventory that is width 71 with blank at index 70.
    """
    names = tuple(
        a.name if isinstance(a, Attribute) else str(a) for a in attribute_order
    )
    if len(set(names)) != len(names):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateAttribute(f"duplicate attribute name(s): {', '.join(dupes)}")
    n = len(names)
    if n == 0:
        raise BadDimension("a layout needs at least one category")
    return CategoryLayout(
        categories=tuple((i, n + i) for i in range(n)),
        blank_index=2 * n,
        names=names,
    )


def grouped_softmax(logits, layout):
    """Per-category log-probabilities over each {+att, -att, blank} triple.

    Returns an (N, T, 3) array of natural-log probabilities; the same shared
    blank logit feeds every category's triple, so each triple sums to one
    but the blank probability differs per category.
    """
    logits = check_logits(logits, n_columns=layout.width)
    t_len = logits.shape[0]
    triples = np.empty((layout.n_categories, t_len, 3))
    triples[:, :, PLUS] = logits[:, layout.plus_indices].T
    triples[:, :, MINUS] = logits[:, layout.minus_indices].T
    triples[:, :, TRIPLE_BLANK] = logits[:, layout.blank_index][None, :]
    return ctc.log_softmax(triples, axis=2)


@dataclass(frozen=True)
class MultiLabelTarget:
    """N equal-length binary target sequences, one per category.

    ``indicator`` is an (N, U) array over {PLUS, MINUS} class indices.
    """

    indicator: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        arr = np.asarray(self.indicator, dtype=np.int64)
        if arr.ndim != 2:
            raise BadDimension(f"target indicator must be 2-D, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (PLUS, MINUS)).all():
            raise BadDimension("target indicator entries must be 0 (+att) or 1 (-att)")
        object.__setattr__(self, "indicator", arr)
        names = tuple(self.names) if self.names else tuple(
            f"cat{i}" for i in range(arr.shape[0])
        )
        if len(names) != arr.shape[0]:
            raise BadDimension("target names must match the category count")
        object.__setattr__(self, "names", names)

    @property
    def n_categories(self):
        return self.indicator.shape[0]

    @property
    def length(self):
        return self.indicator.shape[1]

    def sequences(self):
        """Render the targets as +att/-att TokenSequences."""
        out = []
        for i, name in enumerate(self.names):
            toks = tuple(
                positive_token(name) if c == PLUS else negative_token(name)
                for c in self.indicator[i]
            )
            out.append(TokenSequence(attribute_alphabet(name), toks))
        return out


def targets_from_phonemes(table, phonemes):
    """Decompose a phoneme sequence into the 35 per-attribute targets.

    Every category sequence has the same length as the phoneme sequence;
    position t is PLUS exactly when the phoneme's signature bit is set.
    """
    names = table.attribute_names
    indicator = np.empty((len(names), len(phonemes)), dtype=np.int64)
    for t, ph in enumerate(phonemes.tokens):
        sig = table.signature(ph)
        indicator[:, t] = [PLUS if b else MINUS for b in sig]
    return MultiLabelTarget(indicator=indicator, names=names)


def targets_from_sequences(sequences):
    """Build a MultiLabelTarget from explicit +att/-att TokenSequences."""
    if not sequences:
        raise BadDimension("need at least one category sequence")
    lengths = {len(s) for s in sequences}
    if len(lengths) > 1:
        raise BadDimension(
            f"category sequences must share one length, got {sorted(lengths)}"
        )
    names = []
    rows = []
    for seq in sequences:
        if not seq.alphabet_id.startswith("attribute:"):
            raise BadDimension(
                f"expected attribute sequences, got alphabet {seq.alphabet_id!r}"
            )
        name = seq.alphabet_id.split(":", 1)[1]
        names.append(name)
        rows.append([PLUS if tok == positive_token(name) else MINUS for tok in seq])
    u = lengths.pop()
    indicator = np.asarray(rows, dtype=np.int64).reshape(len(rows), u)
    return MultiLabelTarget(indicator=indicator, names=tuple(names))


@dataclass(frozen=True)
class SctcResult:
    """Summed negative log-likelihood, its per-category split, and gradient."""

    total_neg_log_likelihood: float
    per_category_nll: np.ndarray
    grad: np.ndarray


def _check_feasibility(target, t_len, names):
    for i in range(target.n_categories):
        need = min_path_length(list(target.indicator[i]))
        if need > t_len:
            raise InfeasibleTarget(
                f"category {names[i]!r} needs at least {need} frames, got {t_len}",
                category=i,
            )


def sctc_sb_loss(logits, layout, target, with_grad=True):
    """Shared-blank multi-label CTC loss over raw T x (2N+1) logits.

    The total is the sum of the N per-category CTC negative log-likelihoods
    computed on the grouped softmax triples (equivalently, the negative log
    of the product of the category label probabilities).  The gradient is
    with respect to the raw logits; every category's blank component
    accumulates into the shared blank column.
    """
    logits = check_logits(logits, n_columns=layout.width)
    if target.n_categories != layout.n_categories:
        raise LayoutMismatch(
            f"target has {target.n_categories} categories, layout has "
            f"{layout.n_categories}"
        )
    t_len = logits.shape[0]
    _check_feasibility(target, t_len, layout.names)

    log_probs = grouped_softmax(logits, layout)
    nll, local_grad = ctc.forward_backward(
        log_probs, target.indicator, blank=TRIPLE_BLANK, with_grad=with_grad
    )
    total = float(np.sum(nll))
    if not with_grad:
        return SctcResult(total, nll, None)

    grad = np.zeros_like(logits)
    grad[:, layout.plus_indices] = local_grad[:, :, PLUS].T
    grad[:, layout.minus_indices] = local_grad[:, :, MINUS].T
    grad[:, layout.blank_index] = local_grad[:, :, TRIPLE_BLANK].sum(axis=0)
    return SctcResult(total, nll, grad)
