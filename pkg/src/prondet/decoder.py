"""N-best CTC prefix beam search over a phoneme posteriorgram.

The decoder returns collapsed (blank-free) phoneme sequences with:

* a hypothesis weight, normalized over the final beam so the N-best
  weights behave as a probability distribution over hypotheses;
* the raw log path-sum, kept for monotonicity checks and debugging;
* per output phoneme, the frame of its maximal-contribution emission
  and the frame-level posterior at that frame with blank mass removed
  and renormalized.

``oracle_decode`` enumerates every frame-label path exactly and is the
independent check for small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .pgram_io import Posteriorgram
from .phonemes import PhonemeInventory, PhonemeSeq

LOG_ZERO = -np.inf


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class BeamParams:
    beam_width: int = 16
    n_best: int = 4
    min_phoneme_prob: float = 1e-12  # pruning floor for per-frame extensions

    def __post_init__(self):
        if self.beam_width < 1 or self.n_best < 1:
            raise DecodeError("beam_width and n_best must be positive")
        if self.n_best > self.beam_width:
            raise DecodeError("n_best may not exceed beam_width")


@dataclass(frozen=True)
class Hypothesis:
    seq: PhonemeSeq
    log_weight: float  # log p(r_o|o), normalized over the final beam
    raw_log_prob: float  # unnormalized log path-sum
    emit_frames: tuple[int, ...]
    pos_posteriors: np.ndarray  # (len(seq), width-1), rows sum to 1

    @property
    def weight(self) -> float:
        return float(np.exp(self.log_weight))


class _Entry:
    """Per-prefix beam state: blank/non-blank log mass plus emission metadata."""

    __slots__ = ("lpb", "lpnb", "frames", "last_prob", "best_contrib")

    def __init__(self):
        self.lpb = LOG_ZERO
        self.lpnb = LOG_ZERO
        self.frames = ()
        self.last_prob = 0.0
        self.best_contrib = LOG_ZERO

    def total(self) -> float:
        return float(np.logaddexp(self.lpb, self.lpnb))

    def offer_meta(self, contrib: float, frames, last_prob: float):
        # Emission metadata follows the highest-probability contribution;
        # ties keep the lexicographically earliest frame tuple.
        if contrib > self.best_contrib or (
            contrib == self.best_contrib and frames < self.frames
        ):
            self.best_contrib = contrib
            self.frames = frames
            self.last_prob = last_prob


def extract_pos_posteriors(pgram: Posteriorgram, seq: PhonemeSeq, emit_frames) -> np.ndarray:
    """Frame-level distributions at each emission, blank removed.

    Row i is the posteriorgram row at ``emit_frames[i]`` with the blank
    column dropped and the remainder renormalized to sum to 1.
    """
    emit_frames = tuple(int(t) for t in emit_frames)
    if len(emit_frames) != len(seq):
        raise DecodeError("emit_frames length must equal sequence length")
    if any(b <= a for a, b in zip(emit_frames, emit_frames[1:])):
        raise DecodeError("emit_frames must be strictly increasing")
    if emit_frames and not (0 <= emit_frames[0] and emit_frames[-1] < pgram.num_frames):
        raise DecodeError("emit_frames out of range")
    rows = pgram.frames[list(emit_frames), :-1] if emit_frames else np.zeros((0, pgram.width - 1))
    sums = rows.sum(axis=1, keepdims=True)
    if np.any(sums <= 0.0):
        raise DecodeError("emission frame carries no non-blank mass")
    return rows / sums


def beam_decode(pgram: Posteriorgram, params: BeamParams | None = None) -> list[Hypothesis]:
    """CTC prefix beam search; hypotheses sorted by descending weight.

    Deterministic: beam pruning and output ordering break ties by
    lexicographic phoneme order.  An empty posteriorgram yields the
    single empty hypothesis with weight 1.
    """
    params = params or BeamParams()
    probs = np.asarray(pgram.frames, dtype=np.float64)
    width = pgram.width
    blank = width - 1
    T = probs.shape[0]
    with np.errstate(divide="ignore"):
        log_probs = np.log(probs) if T else np.zeros((0, width))

    init = _Entry()
    init.lpb = 0.0
    init.best_contrib = 0.0
    beam: dict[tuple[int, ...], _Entry] = {(): init}

    for t in range(T):
        lp = log_probs[t]
        p = probs[t]
        nxt: dict[tuple[int, ...], _Entry] = {}

        def entry(prefix):
            e = nxt.get(prefix)
            if e is None:
                e = _Entry()
                nxt[prefix] = e
            return e

        for prefix, cur in beam.items():
            total = cur.total()
            # stay on the same prefix via blank
            e = entry(prefix)
            contrib = total + lp[blank]
            e.lpb = np.logaddexp(e.lpb, contrib)
            e.offer_meta(contrib, cur.frames, cur.last_prob)
            # stay via a repeat of the last emitted phoneme
            if prefix:
                last = prefix[-1]
                contrib = cur.lpnb + lp[last]
                if contrib > LOG_ZERO:
                    e.lpnb = np.logaddexp(e.lpnb, contrib)
                    if p[last] > cur.last_prob:
                        meta = (cur.frames[:-1] + (t,), p[last])
                    else:
                        meta = (cur.frames, cur.last_prob)
                    e.offer_meta(contrib, *meta)
            # extend with a new phoneme
            for c in range(width - 1):
                if p[c] < params.min_phoneme_prob:
                    continue
                if prefix and c == prefix[-1]:
                    base = cur.lpb  # blank-separated repeat only
                else:
                    base = total
                contrib = base + lp[c]
                if contrib == LOG_ZERO:
                    continue
                e2 = entry(prefix + (c,))
                e2.lpnb = np.logaddexp(e2.lpnb, contrib)
                e2.offer_meta(contrib, cur.frames + (t,), p[c])

        ranked = sorted(nxt.items(), key=lambda kv: (-kv[1].total(), kv[0]))
        beam = dict(ranked[: params.beam_width])

    ranked = sorted(beam.items(), key=lambda kv: (-kv[1].total(), kv[0]))
    log_norm = _logsumexp([e.total() for _, e in ranked])
    out = []
    for prefix, e in ranked[: params.n_best]:
        raw = e.total()
        seq = PhonemeSeq(prefix)
        out.append(
            Hypothesis(
                seq=seq,
                log_weight=raw - log_norm,
                raw_log_prob=raw,
                emit_frames=e.frames,
                pos_posteriors=extract_pos_posteriors(pgram, seq, e.frames),
            )
        )
    return out


def _logsumexp(vals) -> float:
    vals = np.asarray(vals, dtype=np.float64)
    hi = vals.max()
    if hi == LOG_ZERO:
        return LOG_ZERO
    return float(hi + np.log(np.exp(vals - hi).sum()))


def collapse_path(path, blank: int) -> tuple[int, ...]:
    """CTC collapse: merge repeats, then drop blanks."""
    out = []
    prev = None
    for c in path:
        if c != prev and c != blank:
            out.append(c)
        prev = c
    return tuple(out)


def oracle_decode(pgram: Posteriorgram, n_best: int) -> list[Hypothesis]:
    """Exact top-N by summed collapsed-path probability.

    Enumerates all width**T frame-label paths; guarded to width**T <= 1e7.
    """
    probs = np.asarray(pgram.frames, dtype=np.float64)
    T, width = probs.shape[0], pgram.width
    blank = width - 1
    if width**T > 10**7:
        raise DecodeError("instance too large for exhaustive decoding")

    mass: dict[tuple[int, ...], float] = {}
    best_path: dict[tuple[int, ...], tuple[float, tuple[int, ...]]] = {}
    for path in itertools.product(range(width), repeat=T):
        p = 1.0
        for t, c in enumerate(path):
            p *= probs[t, c]
            if p == 0.0:
                break
        if p == 0.0:
            continue
        seq = collapse_path(path, blank)
        mass[seq] = mass.get(seq, 0.0) + p
        cur = best_path.get(seq)
        if cur is None or p > cur[0]:
            best_path[seq] = (p, path)

    total = sum(mass.values())
    ranked = sorted(mass.items(), key=lambda kv: (-kv[1], kv[0]))[:n_best]
    out = []
    for seq, m in ranked:
        frames = _emit_frames_of_path(best_path[seq][1], probs, blank)
        pseq = PhonemeSeq(seq)
        out.append(
            Hypothesis(
                seq=pseq,
                log_weight=float(np.log(m / total)),
                raw_log_prob=float(np.log(m)),
                emit_frames=frames,
                pos_posteriors=extract_pos_posteriors(pgram, pseq, frames),
            )
        )
    if not out:  # T == 0
        empty = PhonemeSeq(())
        out.append(Hypothesis(empty, 0.0, 0.0, (), np.zeros((0, width - 1))))
    return out


def _emit_frames_of_path(path, probs, blank) -> tuple[int, ...]:
    """Per output phoneme, the highest-probability frame of its run."""
    frames = []
    prev = None
    for t, c in enumerate(path):
        if c != blank and c != prev:
            frames.append(t)
        elif c != blank and c == prev:
            if probs[t, c] > probs[frames[-1], c]:
                frames[-1] = t
        prev = c
    return tuple(frames)
