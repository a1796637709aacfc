"""Statistical pronunciation model: a conditional edit transducer.

Models p(r | r_c): the probability that a native speaker realizes the
canonical phoneme sequence r_c as the phoneme sequence r.  Generation
proceeds left to right over the canonical phonemes:

* consume canonical c: delete with sub_probs[c][delete], or emit
  phoneme a with sub_probs[c][a];
* after each emission, a geometric insertion block: insert phoneme a
  with probability ins_rate * ins_probs[a], close the block with
  probability 1 - ins_rate.

This locally-normalized process sums to 1 over all output sequences,
and truncating outputs at len(r_c) + m extra phonemes loses at most
the geometric tail of the insertion blocks (< ins_rate**m).

From the transducer and a decoded hypothesis, per-phoneme native
likelihoods are obtained by marginalizing the frame posterior over the
transducer's emission distribution for the aligned canonical phoneme.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .align import Alignment, AlignParams, OpKind, align
from .decoder import Hypothesis
from .phonemes import PhonemeInventory, PhonemeSeq

PROB_ATOL = 1e-9


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class EditTransducer:
    """Conditional edit model over a fixed inventory.

    ``sub_probs`` has one row per non-blank phoneme: columns [0, n) are
    emission probabilities, column n is the deletion probability; every
    row sums to 1.  ``ins_probs`` (length n) sums to 1.
    """

    inventory_hash: str
    sub_probs: np.ndarray  # (n, n+1) with delete in the last column
    ins_probs: np.ndarray  # (n,)
    ins_rate: float
    smoothing_k: float

    @property
    def n(self) -> int:
        return self.ins_probs.shape[0]

    def delete_prob(self, c: int) -> float:
        return float(self.sub_probs[c, self.n])

    def emit_dist(self, c: int) -> np.ndarray:
        """Emission distribution for canonical c, deletion mass renormalized out."""
        emit = self.sub_probs[c, : self.n]
        keep = 1.0 - self.sub_probs[c, self.n]
        if keep <= 0.0:
            return np.zeros_like(emit)
        return emit / keep


def _check_transducer(t: EditTransducer):
    n = t.n
    if t.sub_probs.shape != (n, n + 1):
        raise ModelError("sub_probs shape inconsistent with ins_probs")
    if not 0.0 <= t.ins_rate < 1.0:
        raise ModelError("ins_rate must lie in [0, 1)")
    if np.any(t.sub_probs < 0) or np.any(t.ins_probs < 0):
        raise ModelError("negative probability in transducer")
    if not np.allclose(t.sub_probs.sum(axis=1), 1.0, atol=PROB_ATOL):
        raise ModelError("sub_probs rows must sum to 1")
    if not np.isclose(t.ins_probs.sum(), 1.0, atol=PROB_ATOL):
        raise ModelError("ins_probs must sum to 1")


def identity_transducer(inventory: PhonemeInventory) -> EditTransducer:
    """Zero-noise transducer: every canonical phoneme copied verbatim."""
    n = inventory.size
    sub = np.zeros((n, n + 1))
    sub[np.arange(n), np.arange(n)] = 1.0
    ins = np.full(n, 1.0 / n)
    return EditTransducer(inventory.checksum(), sub, ins, 0.0, 0.0)


def train(
    pairs,
    inventory: PhonemeInventory,
    smoothing_k: float = 0.1,
    align_params: AlignParams | None = None,
) -> EditTransducer:
    """Estimate the transducer from (canonical, recognized) sequence pairs.

    Each pair is aligned with Needleman-Wunsch; Match/Substitute ops
    count as emissions, Delete ops as deletions, Insert ops as insertion
    events.  Add-k smoothing is applied to the emission/deletion rows
    and to the insertion distribution.  Count accumulation is
    order-independent, so pair order never changes the result.
    """
    pairs = list(pairs)
    if not pairs:
        raise ModelError("empty training set")
    n = inventory.size
    emit_counts = np.zeros((n, n + 1))  # last column: delete
    ins_counts = np.zeros(n)
    n_inserts = 0
    n_slots = 0
    for canonical, recognized in pairs:
        al = align(canonical, recognized, align_params)
        for op in al.ops:
            if op.kind is OpKind.INSERT:
                ins_counts[recognized.ids[op.recognized_pos]] += 1
                n_inserts += 1
            elif op.kind is OpKind.DELETE:
                emit_counts[canonical.ids[op.canonical_pos], n] += 1
            else:
                emit_counts[canonical.ids[op.canonical_pos], recognized.ids[op.recognized_pos]] += 1
                n_slots += 1  # every emission opens one insertion block

    k = float(smoothing_k)
    sub = emit_counts + k
    row_sums = sub.sum(axis=1)
    unseen = row_sums == 0.0  # k=0 and the canonical phoneme never observed
    sub[unseen, np.arange(n)[unseen]] = 1.0
    sub /= sub.sum(axis=1, keepdims=True)
    ins = ins_counts + k
    if ins.sum() == 0.0:
        ins = np.full(n, 1.0 / n)
    else:
        ins /= ins.sum()
    ins_rate = n_inserts / (n_inserts + n_slots) if n_slots else 0.0
    t = EditTransducer(inventory.checksum(), sub, ins, float(ins_rate), k)
    _check_transducer(t)
    return t


def sequence_likelihood(t: EditTransducer, recognized: PhonemeSeq, canonical: PhonemeSeq) -> float:
    """p(recognized | canonical): forward sum over all edit paths.

    Two DP lattices: f[i,j] between canonical phonemes, g[i,j] inside
    the insertion block that follows an emission.
    """
    r, c = recognized.ids, canonical.ids
    L, M = len(c), len(r)
    close = 1.0 - t.ins_rate
    f = np.zeros((L + 1, M + 1))
    g = np.zeros((L + 1, M + 1))
    f[0, 0] = 1.0
    for i in range(L + 1):
        for j in range(M + 1):
            f[i, j] += g[i, j] * close
            if g[i, j] and j < M:
                g[i, j + 1] += g[i, j] * t.ins_rate * t.ins_probs[r[j]]
            v = f[i, j]
            if v == 0.0 or i == L:
                continue
            f[i + 1, j] += v * t.sub_probs[c[i], t.n]  # delete
            if j < M:
                g[i + 1, j + 1] += v * t.sub_probs[c[i], r[j]]  # emit
    return float(f[L, M])


@dataclass(frozen=True)
class LikelihoodSeq:
    """Native-pronunciation likelihoods for one aligned hypothesis.

    ``pi[i]`` is the likelihood of recognized phoneme i; ``slot_likelihoods``
    maps each Delete op's canonical position to the deletion probability.
    """

    pi: np.ndarray  # (len(recognized),) in [0,1]
    slot_likelihoods: dict[int, float]


def phoneme_likelihoods(
    t: EditTransducer,
    hyp: Hypothesis,
    alignment: Alignment,
    canonical: PhonemeSeq,
) -> LikelihoodSeq:
    """Per-position marginalization of the frame posterior over the PM.

    For a recognized position aligned to canonical c, the likelihood is
    the expectation of the emission distribution for c under the
    position's posterior.  Insert positions are scored against the
    insertion model; Delete slots carry the deletion probability.
    """
    if hyp.pos_posteriors.shape[0] != len(hyp.seq):
        raise ModelError("hypothesis posteriors inconsistent with its sequence")
    n_rec = sum(1 for op in alignment.ops if op.recognized_pos is not None)
    n_can = sum(1 for op in alignment.ops if op.canonical_pos is not None)
    if n_rec != len(hyp.seq) or n_can != len(canonical):
        raise ModelError("alignment does not relate this canonical/hypothesis pair")
    pi = np.zeros(len(hyp.seq))
    slots: dict[int, float] = {}
    for op in alignment.ops:
        if op.kind is OpKind.DELETE:
            slots[op.canonical_pos] = t.delete_prob(canonical.ids[op.canonical_pos])
            continue
        post = hyp.pos_posteriors[op.recognized_pos]
        if op.kind is OpKind.INSERT:
            pi[op.recognized_pos] = float(post @ t.ins_probs) * t.ins_rate
        else:
            c = canonical.ids[op.canonical_pos]
            pi[op.recognized_pos] = float(post @ t.emit_dist(c))
    return LikelihoodSeq(np.clip(pi, 0.0, 1.0), slots)


def save(t: EditTransducer, path):
    doc = {
        "format": "prondet-pm 1",
        "inventory_hash": t.inventory_hash,
        "sub_probs": t.sub_probs.tolist(),
        "ins_probs": t.ins_probs.tolist(),
        "ins_rate": t.ins_rate,
        "smoothing_k": t.smoothing_k,
    }
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")
    os.replace(tmp, path)


def load(path, inventory: PhonemeInventory) -> EditTransducer:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ModelError(f"{path}: {e}") from None
    if doc.get("format") != "prondet-pm 1":
        raise ModelError(f"{path}: not a pronunciation model file")
    if doc["inventory_hash"] != inventory.checksum():
        raise ModelError(
            f"{path}: inventory hash mismatch "
            f"({doc['inventory_hash']} vs {inventory.checksum()})"
        )
    t = EditTransducer(
        doc["inventory_hash"],
        np.array(doc["sub_probs"], dtype=np.float64),
        np.array(doc["ins_probs"], dtype=np.float64),
        float(doc["ins_rate"]),
        float(doc["smoothing_k"]),
    )
    if t.sub_probs.shape != (inventory.size, inventory.size + 1):
        raise ModelError(f"{path}: table shape does not match inventory")
    _check_transducer(t)
    return t
