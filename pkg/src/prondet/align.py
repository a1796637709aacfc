"""Global alignment of canonical vs. recognized phoneme sequences.

Needleman-Wunsch dynamic programming with a deterministic traceback.
``oracle_align`` recomputes the optimal score by exhaustive enumeration
and exists purely as an independent check for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .phonemes import PhonemeSeq


class OpKind(Enum):
    MATCH = "match"
    SUBSTITUTE = "substitute"
    DELETE = "delete"  # canonical phoneme with no recognized counterpart
    INSERT = "insert"  # recognized phoneme with no canonical counterpart


@dataclass(frozen=True)
class AlignOp:
    kind: OpKind
    canonical_pos: int | None
    recognized_pos: int | None


@dataclass(frozen=True)
class AlignParams:
    match_score: float = 1.0
    mismatch_score: float = -1.0
    gap_score: float = -1.0

    def __post_init__(self):
        if not (self.match_score > self.mismatch_score and self.match_score > self.gap_score):
            raise ValueError("match_score must exceed mismatch_score and gap_score")


@dataclass(frozen=True)
class Alignment:
    ops: tuple[AlignOp, ...]
    score: float

    def replay(self) -> tuple[tuple[int | None, ...], tuple[int | None, ...]]:
        """Project ops back onto (canonical positions, recognized positions)."""
        can = tuple(op.canonical_pos for op in self.ops if op.canonical_pos is not None)
        rec = tuple(op.recognized_pos for op in self.ops if op.recognized_pos is not None)
        return can, rec


def align(canonical: PhonemeSeq, recognized: PhonemeSeq, params: AlignParams | None = None) -> Alignment:
    """Optimal global alignment of the two sequences.

    Traceback ties break Match/Substitute first, then Delete, then
    Insert, so results are deterministic.
    """
    params = params or AlignParams()
    a, b = canonical.ids, recognized.ids
    n, m = len(a), len(b)
    score = np.zeros((n + 1, m + 1))
    score[:, 0] = np.arange(n + 1) * params.gap_score
    score[0, :] = np.arange(m + 1) * params.gap_score
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            diag = params.match_score if a[i - 1] == b[j - 1] else params.mismatch_score
            score[i, j] = max(
                score[i - 1, j - 1] + diag,
                score[i - 1, j] + params.gap_score,
                score[i, j - 1] + params.gap_score,
            )
    ops = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            diag = params.match_score if a[i - 1] == b[j - 1] else params.mismatch_score
            if score[i, j] == score[i - 1, j - 1] + diag:
                kind = OpKind.MATCH if a[i - 1] == b[j - 1] else OpKind.SUBSTITUTE
                ops.append(AlignOp(kind, i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and score[i, j] == score[i - 1, j] + params.gap_score:
            ops.append(AlignOp(OpKind.DELETE, i - 1, None))
            i -= 1
            continue
        ops.append(AlignOp(OpKind.INSERT, None, j - 1))
        j -= 1
    ops.reverse()
    return Alignment(tuple(ops), float(score[n, m]))


def oracle_align(canonical: PhonemeSeq, recognized: PhonemeSeq, params: AlignParams | None = None) -> float:
    """Exact optimal score by enumerating every global alignment.

    Guard: len(a) + len(b) <= 12 (enumeration is exponential).
    """
    params = params or AlignParams()
    a, b = canonical.ids, recognized.ids
    if len(a) + len(b) > 12:
        raise ValueError("instance too large for exhaustive alignment")

    def best(i: int, j: int) -> float:
        if i == len(a) and j == len(b):
            return 0.0
        cands = []
        if i < len(a) and j < len(b):
            s = params.match_score if a[i] == b[j] else params.mismatch_score
            cands.append(s + best(i + 1, j + 1))
        if i < len(a):
            cands.append(params.gap_score + best(i + 1, j))
        if j < len(b):
            cands.append(params.gap_score + best(i, j + 1))
        return max(cands)

    return best(0, 0)
