"""Input validation helpers shared by the numeric modules."""

from __future__ import annotations

import numpy as np

from .errors import BadDimension, NonFiniteLogit


def check_logits(logits, n_columns=None, name="logits"):
    """Coerce to a finite float64 2-D array, optionally pinning the width."""
    arr = np.asarray(logits, dtype=np.float64)
    if arr.ndim != 2:
        raise BadDimension(f"{name} must be 2-D (frames x columns), got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 2:
        raise BadDimension(f"{name} needs at least 1 frame and 2 columns, got {arr.shape}")
    if n_columns is not None and arr.shape[1] != n_columns:
        raise BadDimension(
            f"{name} must have {n_columns} columns, got {arr.shape[1]}"
        )
    if not np.isfinite(arr).all():
        raise NonFiniteLogit(f"{name} contains NaN or infinite entries")
    return arr


def check_target_indices(target, n_labels, name="target"):
    """Validate an integer label sequence drawn from [0, n_labels)."""
    seq = [int(t) for t in target]
    for t in seq:
        if not 0 <= t < n_labels:
            raise BadDimension(
                f"{name} contains label {t}, outside [0, {n_labels}) "
                "(the blank column is never a target label)"
            )
    return seq


def min_path_length(target):
    """Shortest CTC path that can produce ``target``: U plus adjacent repeats."""
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats
