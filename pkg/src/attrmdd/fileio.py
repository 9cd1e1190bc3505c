"""On-disk formats: logits CSV, evaluation triples, decoded output, corpus
directories, and model checkpoints.

All writers emit deterministic bytes for identical inputs (floats via repr,
which round-trips doubles exactly; LF line endings; no timestamps).
"""

from __future__ import annotations

import os

import numpy as np

from .errors import BadDimension
from .inventory import TokenSequence, attribute_alphabet, phoneme_sequence
from .mdd import AnnotatedUtterance


def _format_matrix(matrix):
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise BadDimension(f"matrix must be 2-D, got shape {matrix.shape}")
    rows, cols = matrix.shape
    lines = [f"{rows},{cols}"]
    for row in matrix:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _parse_matrix(text, what):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BadDimension(f"{what} file is empty")
    head = lines[0].split(",")
    if len(head) != 2:
        raise BadDimension(f"{what} header must be 'rows,cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError:
        raise BadDimension(f"{what} header must be integers, got {lines[0]!r}")
    if len(lines) - 1 != rows:
        raise BadDimension(
            f"{what} header promises {rows} rows, file has {len(lines) - 1}"
        )
    out = np.empty((rows, cols), dtype=np.float64)
    for i, line in enumerate(lines[1:]):
        fields = line.split(",")
        if len(fields) != cols:
            raise BadDimension(
                f"{what} row {i} has {len(fields)} columns, expected {cols}"
            )
        try:
            out[i] = [float(f) for f in fields]
        except ValueError:
            raise BadDimension(f"{what} row {i} has a non-numeric field")
    return out


def write_logits_csv(path, logits):
    """Write a raw logits matrix: header ``T,K`` then T comma-separated rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(_format_matrix(logits))


def read_logits_csv(path):
    """Read a logits matrix written by :func:`write_logits_csv`."""
    with open(path, encoding="utf-8") as f:
        return _parse_matrix(f.read(), "logits")


def parse_evaluation_line(line):
    """One utterance: ``canonical|annotated|recognized`` phoneme fields."""
    fields = line.split("|")
    if len(fields) != 3:
        raise BadDimension(
            f"evaluation line needs 3 '|'-separated fields, got {len(fields)}"
        )
    canonical, annotated, recognized = (
        phoneme_sequence(f.split()) for f in fields
    )
    return AnnotatedUtterance(
        canonical=canonical, annotated=annotated, recognized=recognized
    )


def read_evaluation_file(path):
    """Parse an evaluation file: one triple per line, ``#`` comments allowed."""
    utterances = []
    with open(path, encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            utterances.append(parse_evaluation_line(line))
    return utterances


def format_evaluation_line(u):
    return "|".join(
        " ".join(seq.tokens) for seq in (u.canonical, u.annotated, u.recognized)
    )


def format_decoded_attributes(sequences):
    """Decoded attribute output: per line ``attr_name<TAB>tok tok ...``."""
    lines = []
    for seq in sequences:
        name = seq.alphabet_id.split(":", 1)[1]
        lines.append(name + "\t" + " ".join(seq.tokens))
    return "\n".join(lines) + "\n"


def parse_decoded_attributes(text):
    """Inverse of :func:`format_decoded_attributes`."""
    sequences = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        name, _, rest = line.partition("\t")
        sequences.append(TokenSequence(attribute_alphabet(name), tuple(rest.split())))
    return sequences


def format_decoded_phonemes(seq):
    """Phoneme decode output: one line of space-separated symbols."""
    return " ".join(seq.tokens) + "\n"


def save_corpus(directory, corpus):
    """Serialize a corpus: per-utterance feature CSVs plus a manifest TSV.

    Manifest rows are ``utt_id<TAB>phoneme tokens``; each utterance's
    features live in ``<utt_id>.csv`` using the logits CSV layout.
    """
    os.makedirs(directory, exist_ok=True)
    manifest_lines = []
    for i, utt in enumerate(corpus.utterances):
        utt_id = f"utt{i:05d}"
        write_logits_csv(os.path.join(directory, utt_id + ".csv"), utt.features)
        manifest_lines.append(utt_id + "\t" + " ".join(utt.phonemes.tokens))
    manifest = os.path.join(directory, "manifest.tsv")
    with open(manifest, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(manifest_lines) + "\n")


def load_corpus(directory):
    """Load utterances saved by :func:`save_corpus`; returns (features, phonemes) pairs."""
    manifest = os.path.join(directory, "manifest.tsv")
    utterances = []
    with open(manifest, encoding="utf-8") as f:
        for raw in f:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            utt_id, _, tokens = line.partition("\t")
            features = read_logits_csv(os.path.join(directory, utt_id + ".csv"))
            utterances.append((features, phoneme_sequence(tokens.split())))
    return utterances


def save_checkpoint(path, weights, bias):
    """Checkpoint CSV: header ``F,width``, F weight rows, then the bias row."""
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if weights.ndim != 2 or bias.ndim != 1 or bias.shape[0] != weights.shape[1]:
        raise BadDimension(
            f"checkpoint needs (F, width) weights and (width,) bias, got "
            f"{weights.shape} and {bias.shape}"
        )
    stacked = np.vstack([weights, bias[None, :]])
    f_dim, width = weights.shape
    lines = [f"{f_dim},{width}"]
    for row in stacked:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def load_checkpoint(path):
    """Read a checkpoint; returns (weights, bias)."""
    with open(path, encoding="utf-8") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if not lines:
        raise BadDimension("checkpoint file is empty")
    head = lines[0].split(",")
    if len(head) != 2:
        raise BadDimension(f"checkpoint header must be 'F,width', got {lines[0]!r}")
    f_dim, width = int(head[0]), int(head[1])
    body = _parse_matrix(
        "\n".join([f"{f_dim + 1},{width}"] + lines[1:]), "checkpoint"
    )
    return body[:f_dim], body[f_dim]
