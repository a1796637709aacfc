"""Word-level mispronunciation decisions from alignments and likelihoods.

A word's error probability is 0 when every alignment op touching it is
a Match, and otherwise 1 minus the lowest native-pronunciation
likelihood among its non-Match ops.  A word is flagged only when its
error probability clears the threshold for all of the top-N decoding
hypotheses, which suppresses false alarms whenever any plausible
hypothesis matches the canonical pronunciation.

Three ablation modes:

* NOLIK: recognizer treated as certain (one-hot posteriors), no
  pronunciation model; probabilities collapse to {0, 1}.
* LIK: recognizer posteriors used, but only the single canonical
  pronunciation counts as correct.
* PM: full pipeline, posteriors marginalized through the trained
  pronunciation model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .align import Alignment, AlignParams, OpKind, align
from .decoder import Hypothesis
from .phonemes import CanonicalTranscript, PhonemeInventory, PhonemeSeq
from .pm import EditTransducer, LikelihoodSeq, phoneme_likelihoods


class DetectorMode(Enum):
    NOLIK = "nolik"
    LIK = "lik"
    PM = "pm"


class DetectError(ValueError):
    pass


@dataclass(frozen=True)
class WordDecision:
    word_index: int
    word: str
    error_prob: float  # min over the used hypotheses
    per_hypothesis_probs: tuple[float, ...]
    flagged: bool


def _one_hot_posteriors(hyp: Hypothesis, n: int) -> Hypothesis:
    post = np.zeros((len(hyp.seq), n))
    post[np.arange(len(hyp.seq)), list(hyp.seq.ids)] = 1.0
    return replace(hyp, pos_posteriors=post)


def _likelihoods(
    hyp: Hypothesis,
    alignment: Alignment,
    canonical: PhonemeSeq,
    mode: DetectorMode,
    transducer: EditTransducer | None,
    inventory: PhonemeInventory,
) -> LikelihoodSeq:
    if mode is DetectorMode.PM:
        if transducer is None:
            raise DetectError("PM mode requires a trained pronunciation model")
        return phoneme_likelihoods(transducer, hyp, alignment, canonical)
    # NOLIK / LIK: only the canonical phoneme counts as correct.  The
    # likelihood of a recognized position is the posterior mass it puts
    # on its aligned canonical phoneme; insertions and deletions have
    # no native-pronunciation support at all.
    pi = np.zeros(len(hyp.seq))
    slots: dict[int, float] = {}
    for op in alignment.ops:
        if op.kind is OpKind.DELETE:
            slots[op.canonical_pos] = 0.0
        elif op.kind is OpKind.INSERT:
            pi[op.recognized_pos] = 0.0
        else:
            c = canonical.ids[op.canonical_pos]
            pi[op.recognized_pos] = hyp.pos_posteriors[op.recognized_pos, c]
    return LikelihoodSeq(pi, slots)


def word_error_probs(
    alignment: Alignment,
    lik: LikelihoodSeq,
    transcript: CanonicalTranscript,
    inventory: PhonemeInventory,
    recognized: PhonemeSeq,
) -> np.ndarray:
    """Per-word mispronunciation probability for one hypothesis.

    Ops attribute to words through the canonical position; insertions
    attach to the word of the preceding canonical phoneme (word 0 when
    sentence-initial).  Pause/eos phonemes never contribute.
    """
    n_can = sum(1 for op in alignment.ops if op.canonical_pos is not None)
    if n_can != len(transcript.flattened_seq):
        raise DetectError("alignment does not cover the transcript")
    num_words = transcript.num_words
    min_pi = np.full(num_words, np.inf)
    all_match = np.ones(num_words, dtype=bool)
    word_of = transcript.word_index_of
    flat = transcript.flattened_seq.ids
    prev_word = 0
    for op in alignment.ops:
        if op.canonical_pos is not None:
            k = word_of[op.canonical_pos]
            prev_word = k
            if inventory.is_filler(flat[op.canonical_pos]):
                continue
        else:
            k = prev_word
            if inventory.is_filler(recognized.ids[op.recognized_pos]):
                continue
        if op.kind is OpKind.MATCH:
            continue
        if op.kind is OpKind.DELETE:
            pi = lik.slot_likelihoods.get(op.canonical_pos, 0.0)
        else:
            pi = float(lik.pi[op.recognized_pos])
        all_match[k] = False
        min_pi[k] = min(min_pi[k], pi)
    probs = np.where(all_match, 0.0, 1.0 - np.where(np.isinf(min_pi), 1.0, min_pi))
    return np.clip(probs, 0.0, 1.0)


def detect(
    hypotheses: list[Hypothesis],
    transcript: CanonicalTranscript,
    inventory: PhonemeInventory,
    mode: DetectorMode,
    threshold: float,
    n: int = 4,
    transducer: EditTransducer | None = None,
    align_params: AlignParams | None = None,
    flag_below: bool = False,
) -> list[WordDecision]:
    """Decide each word using the top-n hypotheses (AND rule).

    A word is flagged iff its error probability clears the threshold in
    every one of the n hypotheses.  ``flag_below`` inverts the
    comparison (flag when p <= threshold for all hypotheses).
    """
    if not hypotheses:
        raise DetectError("empty hypothesis list")
    if not 0.0 <= threshold <= 1.0:
        raise DetectError("threshold must lie in [0,1]")
    n = min(n, len(hypotheses))
    if n < 1:
        raise DetectError("n must be positive")
    canonical = transcript.flattened_seq
    per_hyp = []
    for hyp in hypotheses[:n]:
        if mode is DetectorMode.NOLIK:
            hyp = _one_hot_posteriors(hyp, inventory.size)
        alignment = align(canonical, hyp.seq, align_params)
        lik = _likelihoods(hyp, alignment, canonical, mode, transducer, inventory)
        per_hyp.append(word_error_probs(alignment, lik, transcript, inventory, hyp.seq))
    probs = np.stack(per_hyp) if per_hyp else np.zeros((0, transcript.num_words))
    decisions = []
    for k in range(transcript.num_words):
        column = probs[:, k]
        err = float(column.min())
        if flag_below:
            flagged = bool(np.all(column <= threshold))
        else:
            flagged = bool(np.all(column >= threshold))
        decisions.append(
            WordDecision(
                word_index=k,
                word=transcript.words[k][0],
                error_prob=err,
                per_hypothesis_probs=tuple(float(x) for x in column),
                flagged=flagged,
            )
        )
    return decisions
