"""Single-alphabet CTC: collapse mapping, log-space loss/gradient, brute force.

The loss marginalizes over every frame-level path that collapses to the
target (merge adjacent repeats, then drop blanks), via the forward recursion
over the blank-interleaved state lattice.  All probability arithmetic is in
log space with -inf standing for probability zero, so frame counts in the
thousands do not underflow.

Conventions: the loss consumes raw (pre-softmax) logits and normalizes rows
internally, so the returned gradient is with respect to the logits and each
gradient row sums to zero.  The blank is always the LAST column.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleTarget, TooLarge
from .validation import check_logits, check_target_indices, min_path_length

NEG_INF = -np.inf


def collapse(path, blank):
    """Apply the CTC collapse: merge adjacent repeats, then remove blanks."""
    merged = []
    prev = object()
    for tok in path:
        if tok != prev:
            merged.append(tok)
        prev = tok
    return [tok for tok in merged if tok != blank]


def log_softmax(logits, axis=-1):
    """Numerically stable log-softmax."""
    shifted = logits - np.max(logits, axis=axis, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))


@dataclass(frozen=True)
class CtcResult:
    """Negative log-likelihood (nats) and its gradient w.r.t. the raw logits."""

    neg_log_likelihood: float
    grad: np.ndarray


def _lattice(targets, blank):
    """Blank-interleaved label lattice for a batch of equal-length targets.

    Returns ``labels`` of shape (n, 2U+1) and the boolean ``skip`` mask
    marking states reachable by the s-2 transition (distinct-label skips).
    """
    targets = np.asarray(targets, dtype=np.int64)
    n, u = targets.shape
    s = 2 * u + 1
    labels = np.full((n, s), blank, dtype=np.int64)
    if u:
        labels[:, 1::2] = targets
    skip = np.zeros((n, s), dtype=bool)
    if s > 2:
        skip[:, 2:] = (labels[:, 2:] != blank) & (labels[:, 2:] != labels[:, :-2])
    return labels, skip


def _forward(emissions, skip):
    """Forward lattice pass; emissions is (n, T, S) log-prob per state."""
    n, t_len, s_len = emissions.shape
    alpha = np.full((n, t_len, s_len), NEG_INF)
    alpha[:, 0, 0] = emissions[:, 0, 0]
    if s_len > 1:
        alpha[:, 0, 1] = emissions[:, 0, 1]
    for t in range(1, t_len):
        prev = alpha[:, t - 1, :]
        from_step = np.full_like(prev, NEG_INF)
        from_step[:, 1:] = prev[:, :-1]
        from_skip = np.full_like(prev, NEG_INF)
        if s_len > 2:
            from_skip[:, 2:] = np.where(skip[:, 2:], prev[:, :-2], NEG_INF)
        alpha[:, t, :] = (
            np.logaddexp(np.logaddexp(prev, from_step), from_skip) + emissions[:, t, :]
        )
    return alpha


def _backward(emissions, skip):
    """Backward lattice pass; beta excludes the emission at its own frame."""
    n, t_len, s_len = emissions.shape
    beta = np.full((n, t_len, s_len), NEG_INF)
    beta[:, -1, -1] = 0.0
    if s_len > 1:
        beta[:, -1, -2] = 0.0
    for t in range(t_len - 2, -1, -1):
        nxt = beta[:, t + 1, :] + emissions[:, t + 1, :]
        to_step = np.full_like(nxt, NEG_INF)
        to_step[:, :-1] = nxt[:, 1:]
        to_skip = np.full_like(nxt, NEG_INF)
        if s_len > 2:
            to_skip[:, :-2] = np.where(skip[:, 2:], nxt[:, 2:], NEG_INF)
        beta[:, t, :] = np.logaddexp(np.logaddexp(nxt, to_step), to_skip)
    return beta


def _total_log_prob(alpha):
    last = alpha[:, -1, -1]
    if alpha.shape[2] > 1:
        return np.logaddexp(last, alpha[:, -1, -2])
    return last


def forward_backward(log_probs, targets, blank, with_grad=True):
    """Batched CTC forward(-backward) over lanes with equal target length.

    Parameters
    ----------
    log_probs : (n, T, C) array of row-normalized natural-log probabilities.
    targets : (n, U) integer array; labels never equal ``blank``.
    blank : column index of the blank label.
    with_grad : skip the backward pass when only the loss is needed.

    Returns
    -------
    nll : (n,) negative log-likelihood per lane.
    grad : (n, T, C) gradient w.r.t. the log-softmax *inputs* (i.e. raw
        logits feeding the normalization), or None when ``with_grad`` is
        false.  Equals softmax(logits) minus the per-column label posterior.
    """
    log_probs = np.asarray(log_probs, dtype=np.float64)
    n, t_len, _ = log_probs.shape
    labels, skip = _lattice(targets, blank)
    lane = np.arange(n)[:, None, None]
    time = np.arange(t_len)[None, :, None]
    emissions = log_probs[lane, time, labels[:, None, :]]

    alpha = _forward(emissions, skip)
    log_p = _total_log_prob(alpha)
    nll = -log_p
    if not with_grad:
        return nll, None

    beta = _backward(emissions, skip)
    # State posterior at (t, s); alpha already contains the frame-t emission.
    log_gamma = alpha + beta - log_p[:, None, None]
    with np.errstate(under="ignore"):
        gamma = np.exp(log_gamma)
    occupancy = np.zeros_like(log_probs)
    np.add.at(
        occupancy,
        (
            np.broadcast_to(lane, gamma.shape),
            np.broadcast_to(time, gamma.shape),
            np.broadcast_to(labels[:, None, :], gamma.shape),
        ),
        gamma,
    )
    grad = np.exp(log_probs) - occupancy
    return nll, grad


def ctc_loss(logits, target):
    """Negative log-likelihood of ``target`` plus gradient w.r.t. ``logits``.

    ``logits`` is a raw T x (|L|+1) matrix with the blank in the last column;
    ``target`` is a sequence of label column indices (blank excluded).
    Raises InfeasibleTarget when the target cannot fit into T frames.
    """
    logits = check_logits(logits)
    t_len, k = logits.shape
    target = check_target_indices(target, k - 1)
    if min_path_length(target) > t_len:
        raise InfeasibleTarget(
            f"target needs at least {min_path_length(target)} frames, got {t_len}"
        )
    log_probs = log_softmax(logits, axis=1)
    nll, grad = forward_backward(
        log_probs[None, :, :], np.asarray([target], dtype=np.int64).reshape(1, -1),
        blank=k - 1,
    )
    return CtcResult(float(nll[0]), grad[0])


def ctc_loss_value(logits, target):
    """Loss-only variant of :func:`ctc_loss` (used by finite differencing)."""
    logits = check_logits(logits)
    t_len, k = logits.shape
    target = check_target_indices(target, k - 1)
    if min_path_length(target) > t_len:
        raise InfeasibleTarget(
            f"target needs at least {min_path_length(target)} frames, got {t_len}"
        )
    log_probs = log_softmax(logits, axis=1)
    nll, _ = forward_backward(
        log_probs[None, :, :], np.asarray([target], dtype=np.int64).reshape(1, -1),
        blank=k - 1, with_grad=False,
    )
    return float(nll[0])


def brute_force_ctc(logits, target, max_paths=10_000_000):
    """Exhaustive-enumeration oracle for the CTC loss.

    Enumerates all (|L|+1)^T frame paths, sums the probability of those that
    collapse to ``target``, and returns the negative log of the sum.  An
    impossible target yields +inf rather than an error, mirroring a true
    zero probability.
    """
    logits = check_logits(logits)
    t_len, k = logits.shape
    target = list(check_target_indices(target, k - 1))
    if k**t_len > max_paths:
        raise TooLarge(f"{k}^{t_len} paths exceed the {max_paths} enumeration guard")
    probs = np.exp(log_softmax(logits, axis=1))
    blank = k - 1
    total = 0.0
    for path in itertools.product(range(k), repeat=t_len):
        if collapse(path, blank) == target:
            p = 1.0
            for t, label in enumerate(path):
                p *= probs[t, label]
            total += p
    if total == 0.0:
        return math.inf
    return -math.log(total)


def finite_difference_gradient(loss_fn, logits, step=1e-5):
    """Central-difference gradient of a scalar loss over a logits matrix."""
    logits = np.asarray(logits, dtype=np.float64)
    grad = np.zeros_like(logits)
    it = np.nditer(logits, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        bumped = logits.copy()
        bumped[idx] += step
        hi = loss_fn(bumped)
        bumped[idx] -= 2 * step
        lo = loss_fn(bumped)
        grad[idx] = (hi - lo) / (2 * step)
    return grad


def max_relative_error(analytic, numeric):
    """Largest elementwise error, relative above magnitude 1, absolute below."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return float(np.max(np.abs(analytic - numeric) / scale))
