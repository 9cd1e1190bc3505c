"""Array-in/array-out bindings for the attrmdd numeric core.

Four functions cover the embedding surface an external training framework
needs: the shared-blank loss with its gradient, the grouped softmax, greedy
decoding, and detection-rate computation.  Inputs and outputs at the boundary
are row-major contiguous float64 arrays, plain integer sequences, and plain
strings; no attrmdd classes leak through unless the caller passes one in.

All functions are pure and hold no module-level mutable state, so they are
safe to call from multiple host threads.  Errors raise the attrmdd exception
taxonomy, re-exported here so hosts can catch them without importing the
primary package directly.
"""

from __future__ import annotations

import numpy as np

import attrmdd
from attrmdd import (
    AttrMddError,
    BadDimension,
    CategoryLayout,
    DuplicateAttribute,
    InfeasibleTarget,
    LayoutMismatch,
    MddCounts,
    MultiLabelTarget,
    NonFiniteLogit,
)

__version__ = attrmdd.__version__

__all__ = [
    "AttrMddError",
    "BadDimension",
    "DuplicateAttribute",
    "InfeasibleTarget",
    "LayoutMismatch",
    "NonFiniteLogit",
    "bound_sctc_sb_loss",
    "compute_rates",
    "decode_all",
    "grouped_softmax",
]


def _as_layout(layout):
    """Build a CategoryLayout from a neutral description.

    Accepts an integer N (the canonical layout: +att columns [0, N), -att
    columns [N, 2N), shared blank at 2N), a mapping with ``categories``,
    ``blank_index``, and optional ``names`` keys, or an existing
    CategoryLayout.
    """
    if isinstance(layout, CategoryLayout):
        return layout
    if isinstance(layout, (int, np.integer)):
        n = int(layout)
        if n < 1:
            raise BadDimension(f"need at least one category, got {n}")
        return CategoryLayout(
            categories=tuple((i, n + i) for i in range(n)), blank_index=2 * n
        )
    return CategoryLayout(
        categories=tuple((int(p), int(m)) for p, m in layout["categories"]),
        blank_index=int(layout["blank_index"]),
        names=tuple(layout.get("names", ())),
    )


def _as_logits(logits):
    return np.ascontiguousarray(logits, dtype=np.float64)


def _as_target(targets, layout):
    rows = [list(int(c) for c in row) for row in targets]
    if len(rows) != layout.n_categories:
        raise LayoutMismatch(
            f"got {len(rows)} target sequences, layout has "
            f"{layout.n_categories} categories"
        )
    lengths = {len(r) for r in rows}
    if len(lengths) > 1:
        raise BadDimension(
            f"target sequences must share one length, got {sorted(lengths)}"
        )
    u = lengths.pop() if lengths else 0
    indicator = np.asarray(rows, dtype=np.int64).reshape(len(rows), u)
    return MultiLabelTarget(indicator=indicator)


def bound_sctc_sb_loss(logits, targets, layout):
    """Shared-blank loss and gradient over raw T x (2N+1) logits.

    ``targets`` is N equal-length integer sequences over {0, 1}, where 0 is
    the category's positive class and 1 its negative class; ``layout`` is a
    layout description (see :func:`_as_layout`).  Returns ``(loss, grad)``
    with ``loss`` a Python float and ``grad`` a fresh contiguous float64
    array shaped like ``logits``.
    """
    layout = _as_layout(layout)
    result = attrmdd.sctc_sb_loss(
        _as_logits(logits), layout, _as_target(targets, layout)
    )
    return float(result.total_neg_log_likelihood), np.ascontiguousarray(result.grad)


def grouped_softmax(logits, layout):
    """Per-category {+, -, blank} log-probabilities as an (N, T, 3) array."""
    layout = _as_layout(layout)
    return np.ascontiguousarray(attrmdd.grouped_softmax(_as_logits(logits), layout))


def decode_all(logits, layout):
    """Greedy best-path decode; returns N lists of plain token strings."""
    layout = _as_layout(layout)
    return [
        list(seq.tokens)
        for seq in attrmdd.decode_all(_as_logits(logits), layout)
    ]


def compute_rates(ta, fr, fa, cd, de):
    """FAR/FRR/DER percentages from plain integer tallies.

    Returns a dict with float values; a rate whose denominator is zero maps
    to None.
    """
    rates = attrmdd.compute_rates(
        MddCounts(ta=int(ta), fr=int(fr), fa=int(fa), cd=int(cd), de=int(de))
    )
    return {"FAR": rates.far, "FRR": rates.frr, "DER": rates.der}
