"""Unit-cost Levenshtein alignment with a deterministic backtrace.

The backtrace prefers match/substitute over delete and delete over insert
when costs tie, so identical inputs always produce the identical edit
script.  That determinism is what makes the downstream error-classification
joins reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlphabetMismatch

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"


@dataclass(frozen=True)
class AlignOp:
    """One edit step; the absent side of an insert/delete is None."""

    op: str
    ref_token: object = None
    hyp_token: object = None


@dataclass(frozen=True)
class Alignment:
    """Edit script plus its operation counts.

    Invariants: substitutions + deletions + matches = len(ref);
    substitutions + insertions + matches = len(hyp).
    """

    ops: tuple
    substitutions: int
    deletions: int
    insertions: int
    matches: int

    @classmethod
    def from_ops(cls, ops):
        ops = tuple(ops)
        kinds = [o.op for o in ops]
        return cls(
            ops=ops,
            substitutions=kinds.count(SUBSTITUTE),
            deletions=kinds.count(DELETE),
            insertions=kinds.count(INSERT),
            matches=kinds.count(MATCH),
        )

    @property
    def distance(self):
        return self.substitutions + self.deletions + self.insertions


def align(ref, hyp):
    """Minimal unit-cost edit script from ``ref`` to ``hyp``.

    Both arguments are TokenSequences over the same alphabet.
    """
    if ref.alphabet_id != hyp.alphabet_id:
        raise AlphabetMismatch(
            f"cannot align {ref.alphabet_id!r} against {hyp.alphabet_id!r}"
        )
    r = list(ref.tokens)
    h = list(hyp.tokens)
    n, m = len(r), len(h)

    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, above = dist[i], dist[i - 1]
        ri = r[i - 1]
        for j in range(1, m + 1):
            diag = above[j - 1] + (ri != h[j - 1])
            row[j] = min(diag, above[j] + 1, row[j - 1] + 1)

    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and here == dist[i - 1][j - 1] + (r[i - 1] != h[j - 1]):
            kind = MATCH if r[i - 1] == h[j - 1] else SUBSTITUTE
            ops.append(AlignOp(kind, r[i - 1], h[j - 1]))
            i -= 1
            j -= 1
        elif i > 0 and here == dist[i - 1][j] + 1:
            ops.append(AlignOp(DELETE, r[i - 1], None))
            i -= 1
        else:
            ops.append(AlignOp(INSERT, None, h[j - 1]))
            j -= 1
    ops.reverse()
    return Alignment.from_ops(ops)
