"""Desk-scale end-to-end training check for the shared-blank loss.

A synthetic corpus renders random phoneme strings as Gaussian cluster frames
(one fixed random center per phoneme plus one silence center used between
phonemes, so repeated attribute tokens stay decodable).  A single linear
projection maps frames to the 71 output nodes and is trained with an
AdamW-style optimizer under a linear warmup.  Held-out decoding quality is
scored per attribute with edit-distance error rates and precision/recall.

Everything is single-threaded and deterministic given the seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alignment import align
from .decoding import decode_all
from .errors import BadConfig, DimensionMismatch, DivergedLoss
from .inventory import (
    PHONEMES,
    TokenSequence,
    phoneme_sequence,
    phonemes_to_attribute_sequence,
)
from .mdd import prf_counts, prf_from_counts
from .sctc import make_layout, sctc_sb_loss, targets_from_phonemes

#: Column index of the between-phoneme silence center (after the 39 phonemes).
SILENCE_CENTER = len(PHONEMES)


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer schedule knobs; defaults follow the toy training recipe."""

    learning_rate: float = 1e-4
    weight_decay: float = 0.005
    epochs: int = 30
    batch_size: int = 32
    warmup_fraction: float = 0.10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate < 0:
            raise BadConfig("learning_rate must be >= 0")
        if self.weight_decay < 0:
            raise BadConfig("weight_decay must be >= 0")
        if self.epochs < 1:
            raise BadConfig("epochs must be >= 1")
        if self.batch_size < 1:
            raise BadConfig("batch_size must be >= 1")
        if not 0 <= self.warmup_fraction < 1:
            raise BadConfig("warmup_fraction must lie in [0, 1)")


@dataclass(frozen=True)
class Utterance:
    """One training item: a T x F feature matrix and its phoneme sequence."""

    features: np.ndarray
    phonemes: TokenSequence


@dataclass(frozen=True)
class SyntheticCorpus:
    """Generated utterances plus the knobs that produced them."""

    utterances: tuple
    generator_seed: int
    frames_per_phoneme: tuple
    noise_scale: float

    def __len__(self):
        return len(self.utterances)

    @property
    def feature_dim(self):
        return self.utterances[0].features.shape[1]

    def split(self, n):
        """Split off the first ``n`` utterances (e.g. train vs held-out).

        Held-out data must come from the same corpus as the training data:
        the cluster centers are drawn per corpus, so utterances from a
        different seed live in a different feature geometry entirely.
        """
        if not 0 < n < len(self.utterances):
            raise BadConfig(
                f"split point {n} outside (0, {len(self.utterances)})"
            )

        def piece(utts):
            return SyntheticCorpus(
                utterances=utts,
                generator_seed=self.generator_seed,
                frames_per_phoneme=self.frames_per_phoneme,
                noise_scale=self.noise_scale,
            )

        return piece(self.utterances[:n]), piece(self.utterances[n:])


def _as_range(value, name):
    if isinstance(value, int):
        value = (value, value)
    lo, hi = int(value[0]), int(value[1])
    if lo < 0 or hi < lo:
        raise BadConfig(f"{name} must be a non-decreasing non-negative range")
    return lo, hi


def generate_corpus(
    seed,
    n_utterances,
    phoneme_set=None,
    feature_dim=128,
    frames_per_phoneme=(1, 3),
    transition_frames=(1, 1),
    noise_scale=0.05,
    utterance_length=(3, 8),
    center_scale=12.0,
):
    """Render random phoneme strings as noisy cluster-center frame runs.

    Each phoneme holds a fixed random center in feature space; between
    phonemes the silence center is emitted for a few frames, which is where
    a trained model learns to fire the shared blank.  Utterances are padded
    with silence frames when a string of same-signature phonemes would
    otherwise leave some attribute target infeasible.  Fully reproducible
    from ``seed``.

    The defaults are deliberately short frame runs with wide, well-separated
    centers: the training budget is a few hundred small-step updates, so the
    corpus keeps lattice alignments crisp (few valid paths per category) and
    lets logits grow fast enough for the collapse stage to read them.
    """
    if feature_dim < 8:
        raise BadConfig(f"feature_dim must be >= 8, got {feature_dim}")
    if n_utterances < 1:
        raise BadConfig("n_utterances must be >= 1")
    if noise_scale < 0:
        raise BadConfig("noise_scale must be >= 0")
    fpp = _as_range(frames_per_phoneme, "frames_per_phoneme")
    if fpp[0] < 1:
        raise BadConfig("frames_per_phoneme must be >= 1")
    trans = _as_range(transition_frames, "transition_frames")
    ulen = _as_range(utterance_length, "utterance_length")
    if ulen[0] < 1:
        raise BadConfig("utterance_length must be >= 1")

    symbols = tuple(phoneme_set) if phoneme_set is not None else PHONEMES
    pool = phoneme_sequence(symbols)  # validates membership up front

    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=center_scale, size=(len(PHONEMES) + 1, feature_dim))
    index = {ph: PHONEMES.index(ph) for ph in pool.tokens}

    utterances = []
    for _ in range(n_utterances):
        length = int(rng.integers(ulen[0], ulen[1] + 1))
        phonemes = [pool.tokens[k] for k in rng.integers(0, len(pool), size=length)]
        pieces = []
        for j, ph in enumerate(phonemes):
            if j > 0:
                n_sil = int(rng.integers(trans[0], trans[1] + 1))
                if n_sil:
                    pieces.append((SILENCE_CENTER, n_sil))
            n_frames = int(rng.integers(fpp[0], fpp[1] + 1))
            pieces.append((index[ph], n_frames))

        # Worst-case feasible length over the 35 attribute targets is
        # 2*length - 1 (every adjacent pair sharing a bit); pad with silence.
        total = sum(n for _, n in pieces)
        need = 2 * length - 1
        if total < need:
            pieces.append((SILENCE_CENTER, need - total))
            total = need

        features = np.empty((total, feature_dim))
        t = 0
        for center_idx, n_frames in pieces:
            block = np.broadcast_to(centers[center_idx], (n_frames, feature_dim))
            features[t : t + n_frames] = block
            t += n_frames
        if noise_scale:
            features = features + rng.normal(scale=noise_scale, size=features.shape)
        utterances.append(
            Utterance(features=features, phonemes=phoneme_sequence(phonemes))
        )
    return SyntheticCorpus(
        utterances=tuple(utterances),
        generator_seed=seed,
        frames_per_phoneme=fpp,
        noise_scale=noise_scale,
    )


@dataclass(frozen=True)
class LinearModel:
    """Frame-wise linear projection to the 2N+1 output nodes."""

    weights: np.ndarray  # (F, width)
    bias: np.ndarray  # (width,)

    @classmethod
    def zeros(cls, feature_dim, width):
        return cls(
            weights=np.zeros((feature_dim, width)), bias=np.zeros(width)
        )

    @property
    def feature_dim(self):
        return self.weights.shape[0]

    @property
    def width(self):
        return self.weights.shape[1]

    def logits(self, features):
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.feature_dim:
            raise DimensionMismatch(
                f"features must be (T, {self.feature_dim}), got {features.shape}"
            )
        return features @ self.weights + self.bias


class _AdamW:
    """Decoupled-weight-decay Adam with bias correction.

    The decay multiplies parameters directly by (1 - lr*wd) each step; it is
    never folded into the loss gradient.  The bias vector is not decayed.
    """

    def __init__(self, params, weight_decay, betas=(0.9, 0.999), eps=1e-8):
        self.params = params  # dict name -> array (mutated in place)
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads, lr, decay_exempt=()):
        self.step_count += 1
        c1 = 1.0 - self.beta1**self.step_count
        c2 = 1.0 - self.beta2**self.step_count
        for key, p in self.params.items():
            g = grads[key]
            m = self.m[key]
            v = self.v[key]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = (m / c1) / (np.sqrt(v / c2) + self.eps)
            if self.weight_decay and key not in decay_exempt:
                p *= 1.0 - lr * self.weight_decay
            p -= lr * update


def _utterance_list(corpus):
    return list(corpus.utterances) if hasattr(corpus, "utterances") else list(corpus)


def _warmup_schedule(base_lr, total_steps, warmup_fraction):
    warmup_steps = int(round(warmup_fraction * total_steps))

    def lr_at(step):  # 0-based step index
        if step < warmup_steps:
            return base_lr * (step + 1) / warmup_steps
        return base_lr

    return lr_at


def train(corpus, table, config=TrainConfig()):
    """Fit the linear projection by mini-batch descent on the shared-blank loss.

    Returns (model, loss_curve) where loss_curve holds the mean per-utterance
    loss of each epoch.  Deterministic given the config seed: the shuffle
    order is fixed and batches reduce in a fixed order.
    """
    utterances = _utterance_list(corpus)
    if not utterances:
        raise BadConfig("corpus is empty")
    layout = make_layout(table.attribute_order)
    feature_dim = utterances[0].features.shape[1]
    targets = [targets_from_phonemes(table, u.phonemes) for u in utterances]

    params = {
        "weights": np.zeros((feature_dim, layout.width)),
        "bias": np.zeros(layout.width),
    }
    opt = _AdamW(params, weight_decay=config.weight_decay)
    n_batches = (len(utterances) + config.batch_size - 1) // config.batch_size
    lr_at = _warmup_schedule(
        config.learning_rate, config.epochs * n_batches, config.warmup_fraction
    )

    rng = np.random.default_rng(config.seed)
    step = 0
    curve = []
    for _ in range(config.epochs):
        order = rng.permutation(len(utterances))
        epoch_loss = 0.0
        for b in range(n_batches):
            batch = order[b * config.batch_size : (b + 1) * config.batch_size]
            grad_w = np.zeros_like(params["weights"])
            grad_b = np.zeros_like(params["bias"])
            batch_loss = 0.0
            for k in batch:
                u = utterances[k]
                logits = u.features @ params["weights"] + params["bias"]
                if not np.isfinite(logits).all():
                    raise DivergedLoss(f"non-finite logits at step {step}")
                result = sctc_sb_loss(logits, layout, targets[k])
                batch_loss += result.total_neg_log_likelihood
                grad_w += u.features.T @ result.grad
                grad_b += result.grad.sum(axis=0)
            if not np.isfinite(batch_loss):
                raise DivergedLoss(f"non-finite loss at step {step}")
            epoch_loss += batch_loss
            scale = 1.0 / len(batch)
            opt.step(
                {"weights": grad_w * scale, "bias": grad_b * scale},
                lr_at(step),
                decay_exempt=("bias",),
            )
            step += 1
        curve.append(epoch_loss / len(utterances))
    model = LinearModel(weights=params["weights"], bias=params["bias"])
    return model, curve


@dataclass(frozen=True)
class AttributeScore:
    """Micro-averaged per-attribute decoding quality over a corpus."""

    name: str
    error_rate: float
    precision: object
    recall: object
    f1: object


@dataclass(frozen=True)
class EvaluationReport:
    per_attribute: tuple = field(default=())

    @property
    def mean_error_rate(self):
        return float(np.mean([s.error_rate for s in self.per_attribute]))

    def to_dict(self):
        return {
            "mean_error_rate": self.mean_error_rate,
            "per_attribute": [
                {
                    "attribute": s.name,
                    "error_rate": s.error_rate,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                }
                for s in self.per_attribute
            ],
        }


def evaluate(model, corpus, table):
    """Decode every utterance and score each attribute against its targets.

    Error rates are micro-averaged (summed edit distance over summed
    reference length, as a percentage); precision/recall/F1 likewise pool
    token counts over the whole corpus.
    """
    utterances = _utterance_list(corpus)
    layout = make_layout(table.attribute_order)
    if model.width != layout.width:
        raise DimensionMismatch(
            f"model emits {model.width} columns, layout needs {layout.width}"
        )
    names = table.attribute_names
    distance = np.zeros(len(names))
    ref_len = np.zeros(len(names), dtype=np.int64)
    tp = np.zeros(len(names), dtype=np.int64)
    fp = np.zeros(len(names), dtype=np.int64)
    fn = np.zeros(len(names), dtype=np.int64)
    for u in utterances:
        decoded = decode_all(model.logits(u.features), layout)
        for i, name in enumerate(names):
            ref = phonemes_to_attribute_sequence(table, name, u.phonemes)
            distance[i] += align(ref, decoded[i]).distance
            ref_len[i] += len(ref)
            tpi, fpi, fni = prf_counts(ref, decoded[i])
            tp[i] += tpi
            fp[i] += fpi
            fn[i] += fni

    scores = []
    for i, name in enumerate(names):
        pre, rec, f1 = prf_from_counts(int(tp[i]), int(fp[i]), int(fn[i]))
        scores.append(
            AttributeScore(
                name=name,
                error_rate=100.0 * distance[i] / ref_len[i],
                precision=pre,
                recall=rec,
                f1=f1,
            )
        )
    return EvaluationReport(per_attribute=tuple(scores))
