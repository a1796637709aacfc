"""Scoring of word decisions against annotations.

Word-level precision / recall with Wilson score confidence intervals,
threshold sweeps and precision-recall curve export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .detect import WordDecision
from .pgram_io import ErrorAnnotation

Z_95 = 1.959964


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float | None  # None when tp+fp == 0
    recall: float | None
    precision_ci: tuple[float, float] | None
    recall_ci: tuple[float, float] | None
    counts: ConfusionCounts


def score(decisions: dict[str, list[WordDecision]], annotations: list[ErrorAnnotation]) -> ConfusionCounts:
    """Word-level confusion counts over all annotated utterances."""
    counts = ConfusionCounts()
    for ann in annotations:
        if ann.utterance_id not in decisions:
            raise EvalError(f"no decisions for annotated utterance {ann.utterance_id!r}")
        decs = decisions[ann.utterance_id]
        if len(decs) != len(ann.labels):
            raise EvalError(
                f"utterance {ann.utterance_id!r}: {len(decs)} decisions "
                f"vs {len(ann.labels)} labels"
            )
        tp = fp = fn = tn = 0
        for dec, label in zip(decs, ann.labels):
            if dec.flagged and label:
                tp += 1
            elif dec.flagged:
                fp += 1
            elif label:
                fn += 1
            else:
                tn += 1
        counts = counts + ConfusionCounts(tp, fp, fn, tn)
    return counts


def precision_recall(counts: ConfusionCounts) -> tuple[float | None, float | None]:
    """(precision, recall); a metric with an empty denominator is None."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else None
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else None
    return precision, recall


def wilson_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise EvalError("wilson_ci requires trials > 0")
    if not 0 <= successes <= trials:
        raise EvalError("successes must lie in [0, trials]")
    if confidence == 0.95:
        z = Z_95
    else:
        z = math.sqrt(2.0) * _erfinv(confidence)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    # boundary proportions have exact interval endpoints; avoid float drift
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


def _erfinv(c: float) -> float:
    # bisection on erf; only used for non-default confidence levels
    lo, hi = 0.0, 10.0
    for _ in range(200):
        mid = (lo + hi) / 2
        if math.erf(mid) < c:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def sweep(
    error_probs: dict[str, list[float]],
    annotations: list[ErrorAnnotation],
    thresholds,
) -> list[PRPoint]:
    """One PRPoint per threshold, from stored per-word error probabilities.

    ``error_probs[utt][k]`` is the word's error probability minimized
    over the used hypotheses; a word counts as flagged at threshold t
    iff its probability is >= t, so flag sets are nested and recall is
    non-increasing along an increasing grid.
    """
    thresholds = list(thresholds)
    if not thresholds:
        raise EvalError("empty threshold grid")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise EvalError("threshold grid must be strictly increasing")
    if any(t < 0.0 or t > 1.0 for t in thresholds):
        raise EvalError("thresholds must lie in [0,1]")
    points = []
    for t in thresholds:
        counts = ConfusionCounts()
        for ann in annotations:
            if ann.utterance_id not in error_probs:
                raise EvalError(f"no probabilities for utterance {ann.utterance_id!r}")
            probs = error_probs[ann.utterance_id]
            if len(probs) != len(ann.labels):
                raise EvalError(f"utterance {ann.utterance_id!r}: word count mismatch")
            tp = fp = fn = tn = 0
            for p, label in zip(probs, ann.labels):
                flagged = p >= t
                if flagged and label:
                    tp += 1
                elif flagged:
                    fp += 1
                elif label:
                    fn += 1
                else:
                    tn += 1
            counts = counts + ConfusionCounts(tp, fp, fn, tn)
        precision, recall = precision_recall(counts)
        points.append(
            PRPoint(
                threshold=t,
                precision=precision,
                recall=recall,
                precision_ci=wilson_ci(counts.tp, counts.tp + counts.fp)
                if counts.tp + counts.fp
                else None,
                recall_ci=wilson_ci(counts.tp, counts.tp + counts.fn)
                if counts.tp + counts.fn
                else None,
                counts=counts,
            )
        )
    return points


def matched_recall_comparison(points_a, points_b, tolerance: float = 0.02):
    """Best-precision point pairs whose recalls agree within tolerance.

    Returns (point_a, point_b) maximizing min(precision) over all pairs
    with |recall_a - recall_b| <= tolerance, or None when no pair
    qualifies.  Mirrors a same-recall precision comparison between two
    systems' sweeps.
    """
    best = None
    for a in points_a:
        if a.recall is None or a.precision is None:
            continue
        for b in points_b:
            if b.recall is None or b.precision is None:
                continue
            if abs(a.recall - b.recall) <= tolerance:
                key = min(a.precision, b.precision)
                if best is None or key > best[0]:
                    best = (key, a, b)
    return None if best is None else (best[1], best[2])


def export_curve_csv(points: list[PRPoint], path):
    """CSV columns: threshold,precision,p_lo,p_hi,recall,r_lo,r_hi."""
    def fmt(x):
        return "" if x is None else f"{x:.6f}"

    with open(path, "w", encoding="utf-8") as f:
        f.write("threshold,precision,p_lo,p_hi,recall,r_lo,r_hi\n")
        for pt in points:
            p_lo, p_hi = pt.precision_ci if pt.precision_ci else (None, None)
            r_lo, r_hi = pt.recall_ci if pt.recall_ci else (None, None)
            f.write(
                f"{pt.threshold:.6f},{fmt(pt.precision)},{fmt(p_lo)},{fmt(p_hi)},"
                f"{fmt(pt.recall)},{fmt(r_lo)},{fmt(r_hi)}\n"
            )


def summary_dict(mode: str, counts: ConfusionCounts) -> dict:
    precision, recall = precision_recall(counts)
    return {
        "mode": mode,
        "precision": precision,
        "precision_ci": list(wilson_ci(counts.tp, counts.tp + counts.fp))
        if counts.tp + counts.fp
        else None,
        "recall": recall,
        "recall_ci": list(wilson_ci(counts.tp, counts.tp + counts.fn))
        if counts.tp + counts.fn
        else None,
        "counts": {"tp": counts.tp, "fp": counts.fp, "fn": counts.fn, "tn": counts.tn},
    }
