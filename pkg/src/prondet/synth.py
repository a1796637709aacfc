"""Seeded synthetic corpus generator.

Produces a desk-scale benchmark with exact ground truth: an artificial
lexicon whose words have native pronunciation variants, simulated L2
error injection with word-level labels, and noisy posteriorgram
emission.  Everything is a pure function of (config, master seed), so a
regenerated corpus is bit-identical.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import pgram_io
from .pgram_io import CorpusManifest, ErrorAnnotation, Posteriorgram, Utterance, make_posteriorgram
from .phonemes import (
    CanonicalTranscript,
    PhonemeInventory,
    PhonemeSeq,
    build_inventory,
    make_transcript,
    seq_from_labels,
)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class VariabilityModel:
    """Native pronunciation variability: per-word variants and word linking."""

    variants: dict[str, list[tuple[PhonemeSeq, float]]]
    p_link: float = 0.0  # merge identical adjacent phonemes across a word boundary

    def __post_init__(self):
        for word, vs in self.variants.items():
            total = sum(p for _, p in vs)
            if abs(total - 1.0) > 1e-9:
                raise SynthError(f"variant probabilities for {word!r} sum to {total}")


@dataclass(frozen=True)
class ErrorModel:
    """Simulated L2 mispronunciation injection."""

    word_error_rate: float
    sub_pairs: dict[int, list[tuple[int, float]]]  # canonical id -> (target id, weight)
    shares: tuple[float, float, float] = (0.7, 0.2, 0.1)  # sub, del, ins

    def __post_init__(self):
        if not 0.0 <= self.word_error_rate <= 1.0:
            raise SynthError("word_error_rate must lie in [0,1]")
        if abs(sum(self.shares) - 1.0) > 1e-9:
            raise SynthError("error-type shares must sum to 1")


@dataclass(frozen=True)
class EmissionModel:
    """Posteriorgram emission: durations, target mass and acoustic spread."""

    mean_duration: float = 3.0  # frames per phoneme, geometric
    alpha: float = 0.85  # posterior mass on the true phoneme
    spread: dict[int, list[tuple[int, float]]] = field(default_factory=dict)
    spread_share: float = 0.8  # fraction of residual mass on spread neighbors
    blank_rate: float = 0.3  # chance of a blank separator frame between phonemes
    noise: float = 0.0  # Dirichlet concentration for per-frame jitter; 0 = exact rows
    confusion_rate: float = 0.0  # chance a whole segment is rendered ambiguously

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise SynthError("alpha must lie in (0,1]")
        if self.mean_duration < 1.0:
            raise SynthError("mean_duration must be >= 1 frame")
        if self.noise < 0.0:
            raise SynthError("noise must be >= 0")
        if not 0.0 <= self.confusion_rate <= 1.0:
            raise SynthError("confusion_rate must lie in [0,1]")
        if not 0.0 <= self.spread_share <= 1.0:
            raise SynthError("spread_share must lie in [0,1]")


def utterance_rng(master_seed: int, utt_id: str) -> np.random.Generator:
    """Independent, reproducible stream per utterance id."""
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, zlib.crc32(utt_id.encode("utf-8"))])
    )


def _realize_words(
    transcript: CanonicalTranscript, variability: VariabilityModel, rng: np.random.Generator
) -> list[list[int]]:
    """Pick a variant per word, then apply cross-word linking merges."""
    words = []
    for word, _ in transcript.words:
        vs = variability.variants.get(word)
        if not vs:
            raise SynthError(f"word {word!r} not covered by the variability model")
        probs = [p for _, p in vs]
        idx = rng.choice(len(vs), p=probs)
        words.append(list(vs[idx][0].ids))
    for i in range(len(words) - 1):
        if (
            words[i]
            and words[i + 1]
            and words[i][-1] == words[i + 1][0]
            and rng.random() < variability.p_link
        ):
            words[i + 1] = words[i + 1][1:]
    return words


def sample_native(
    transcript: CanonicalTranscript, variability: VariabilityModel, seed: int
) -> PhonemeSeq:
    """A native realization of the transcript, deterministic given seed."""
    rng = np.random.default_rng(seed)
    words = _realize_words(transcript, variability, rng)
    return PhonemeSeq(tuple(p for w in words for p in w))


def _inject_errors_words(
    words: list[list[int]],
    error_model: ErrorModel,
    content_ids: list[int],
    rng: np.random.Generator,
) -> tuple[list[list[int]], list[int]]:
    labels = []
    out = []
    for w in words:
        if not w or rng.random() >= error_model.word_error_rate:
            out.append(list(w))
            labels.append(0)
            continue
        w = list(w)
        kind = rng.choice(3, p=list(error_model.shares))
        if kind == 1 and len(w) < 2:
            kind = 0  # cannot delete the only phoneme; substitute instead
        if kind == 0:  # substitution
            pos_with_pairs = [i for i, p in enumerate(w) if error_model.sub_pairs.get(p)]
            if pos_with_pairs:
                i = int(rng.choice(pos_with_pairs))
                targets = error_model.sub_pairs[w[i]]
                weights = np.array([x for _, x in targets], dtype=np.float64)
                j = rng.choice(len(targets), p=weights / weights.sum())
                w[i] = targets[j][0]
            else:
                i = int(rng.integers(len(w)))
                choices = [c for c in content_ids if c != w[i]]
                w[i] = int(rng.choice(choices))
            labels.append(1)
        elif kind == 1:  # deletion
            i = int(rng.integers(len(w)))
            del w[i]
            labels.append(1)
        else:  # insertion
            i = int(rng.integers(len(w) + 1))
            w.insert(i, int(rng.choice(content_ids)))
            labels.append(1)
        out.append(w)
    return out, labels


def inject_errors(
    seq: PhonemeSeq,
    transcript: CanonicalTranscript,
    error_model: ErrorModel,
    inventory: PhonemeInventory,
    seed: int,
) -> tuple[PhonemeSeq, list[int]]:
    """Perturb per-word phonemes; labels mark exactly the touched words.

    ``seq`` must be word-segmentable like the transcript (same per-word
    lengths); use the word-list pipeline in :func:`generate_corpus` for
    realizations whose segmentation differs from the canonical one.
    """
    if len(seq) != len(transcript.flattened_seq):
        raise SynthError("sequence does not segment like the transcript")
    words = []
    for lo, hi in transcript.word_slices():
        words.append(list(seq.ids[lo:hi]))
    content = _content_ids(inventory)
    rng = np.random.default_rng(seed)
    out, labels = _inject_errors_words(words, error_model, content, rng)
    return PhonemeSeq(tuple(p for w in out for p in w)), labels


def _content_ids(inventory: PhonemeInventory) -> list[int]:
    return [
        i
        for i in range(inventory.size)
        if not inventory.is_filler(i)
    ]


def emit_posteriorgram(
    seq: PhonemeSeq,
    emission: EmissionModel,
    inventory: PhonemeInventory,
    seed: int,
) -> Posteriorgram:
    """Render a phoneme sequence as a noisy frame-probability matrix.

    Phoneme frames carry no blank mass: the true phoneme holds alpha and
    the remainder splits between acoustically-close phonemes
    (``spread_share``) and a uniform floor over the other content
    phonemes.  With probability ``confusion_rate`` a whole
    segment is rendered ambiguously -- a spread neighbor dominates while
    the true phoneme keeps substantial posterior mass -- modeling frames
    the recognizer gets wrong but remains visibly uncertain about.
    Identical adjacent phonemes are always separated by a blank frame so
    CTC collapse recovers the sequence.
    """
    rng = np.random.default_rng(seed)
    width = inventory.width
    blank = inventory.blank_id
    content = _content_ids(inventory)
    rows = []
    p_stop = 1.0 / emission.mean_duration
    prev = None
    for ph in seq.ids:
        if prev is not None and (ph == prev or rng.random() < emission.blank_rate):
            rows.append(_blank_row(width, blank))
        duration = int(rng.geometric(p_stop)) if p_stop < 1.0 else 1
        neighbors = emission.spread.get(ph)
        if neighbors and rng.random() < emission.confusion_rate:
            w = np.array([x for _, x in neighbors], dtype=np.float64)
            rival = neighbors[int(rng.choice(len(neighbors), p=w / w.sum()))][0]
            row = _confused_row(ph, rival, content, width)
        else:
            row = _phoneme_row(ph, emission, content, width)
        for _ in range(duration):
            rows.append(_jitter(row, emission.noise, rng))
        prev = ph
    frames = np.array(rows) if rows else np.zeros((0, width))
    return make_posteriorgram(frames, inventory)


def _phoneme_row(ph: int, emission: EmissionModel, content, width: int) -> np.ndarray:
    row = np.zeros(width)
    row[ph] = emission.alpha
    rest = 1.0 - emission.alpha
    if rest > 0.0:
        neighbors = emission.spread.get(ph)
        if neighbors:
            w = np.array([x for _, x in neighbors], dtype=np.float64)
            w = w / w.sum() * rest * emission.spread_share
            for (tgt, _), wi in zip(neighbors, w):
                row[tgt] += wi
            uniform_mass = rest * (1.0 - emission.spread_share)
        else:
            uniform_mass = rest
        others = [c for c in content if c != ph]
        row[others] += uniform_mass / len(others)
    return row / row.sum()


def _confused_row(ph: int, rival: int, content, width: int) -> np.ndarray:
    # ambiguous rendering: the rival wins decisively (so the decoder
    # substitutes rather than emitting both phonemes) while the true
    # phoneme keeps enough mass for uncertainty-aware discounting
    row = np.zeros(width)
    row[rival] = 0.60
    row[ph] = 0.12
    others = [c for c in content if c != ph and c != rival]
    row[others] = 0.28 / len(others)
    return row


def _jitter(row: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    """Dirichlet jitter around a base row; support (zero entries) is preserved."""
    if noise <= 0.0:
        return row
    out = np.zeros_like(row)
    pos = row > 0.0
    out[pos] = rng.dirichlet(row[pos] * noise)
    return out


def _blank_row(width: int, blank: int) -> np.ndarray:
    row = np.full(width, 0.05 / (width - 1))
    row[blank] = 0.95
    return row


@dataclass(frozen=True)
class GeneratorConfig:
    inventory: PhonemeInventory
    lexicon: dict[str, list[PhonemeSeq]]  # first entry is the canonical form
    variability: VariabilityModel
    error_model: ErrorModel
    emission: EmissionModel
    sizes: dict[str, int]  # split name ("train_L1", "test_L2", ...) -> utterances
    words_per_utterance: tuple[int, int] = (3, 6)
    master_seed: int = 20260823


def default_config(
    master_seed: int = 20260823,
    word_error_rate: float = 0.275,
    sizes: dict[str, int] | None = None,
) -> GeneratorConfig:
    """The built-in 12-content-phoneme benchmark configuration.

    50 words of length 2-5; 40% of words carry a second native variant
    built from the vowel-reduction pairs; L2 errors substitute along
    confusion pairs natives do not use.
    """
    labels = ["aa", "eh", "ey", "ih", "ax", "s", "t", "k", "m", "n", "d", "g",
              "pause", "eos", "blank"]
    inv = build_inventory(labels)
    rng = np.random.default_rng(991)
    content_labels = labels[:12]
    # native variant pairs (phonetic variability) vs. L2 error pairs
    variant_pairs = {"ih": "ax", "aa": "ax"}
    error_pairs = {"eh": "ey", "s": "t", "k": "g", "m": "n"}
    # acoustic confusion is acyclic and avoids the L2 error directions:
    # a correctly spoken phoneme can leak onto (or lose to) a neighbor,
    # but an error target keeps no mass on the canonical it replaced,
    # and no confusion pair mirrors an injected error pair
    spread_pairs = {"eh": ["ih"], "ey": ["ih"], "ih": ["ax"], "aa": ["ax"],
                    "s": ["d"], "t": ["d"], "d": ["g"], "k": ["t"], "n": ["m"]}

    lexicon: dict[str, list[PhonemeSeq]] = {}
    variants: dict[str, list[tuple[PhonemeSeq, float]]] = {}
    for w in range(50):
        word = f"w{w:02d}"
        length = int(rng.integers(2, 6))
        phones = [content_labels[int(rng.integers(12))] for _ in range(length)]
        canon = seq_from_labels(phones, inv)
        prons = [canon]
        vlist = [(canon, 1.0)]
        variable = [i for i, p in enumerate(phones) if p in variant_pairs]
        if variable and rng.random() < 0.4:
            i = variable[0]
            alt_phones = list(phones)
            alt_phones[i] = variant_pairs[phones[i]]
            alt = seq_from_labels(alt_phones, inv)
            prons.append(alt)
            vlist = [(canon, 0.6), (alt, 0.4)]
        lexicon[word] = prons
        variants[word] = vlist

    sub_pairs = {
        inv.index(src): [(inv.index(dst), 1.0)] for src, dst in error_pairs.items()
    }
    spread = {
        inv.index(src): [(inv.index(d), 1.0) for d in dsts]
        for src, dsts in spread_pairs.items()
    }
    return GeneratorConfig(
        inventory=inv,
        lexicon=lexicon,
        variability=VariabilityModel(variants, p_link=0.5),
        error_model=ErrorModel(word_error_rate, sub_pairs),
        emission=EmissionModel(
            mean_duration=3.0, alpha=0.72, spread=spread, spread_share=0.25,
            blank_rate=0.3, noise=50.0, confusion_rate=0.12,
        ),
        sizes=sizes or {"train_L1": 200, "test_L2": 50},
        master_seed=master_seed,
    )


@dataclass(frozen=True)
class GroundTruth:
    """Generator bookkeeping for oracle scoring."""

    utterance_id: str
    text: str
    realized_labels: tuple[str, ...]  # phonemes actually "spoken"
    word_labels: tuple[int, ...]


def generate_corpus(config: GeneratorConfig, out_dir) -> tuple[CorpusManifest, list[ErrorAnnotation], list[GroundTruth]]:
    """Write a complete corpus: posteriorgrams, manifest, annotations.

    L1 splits are error-free native realizations; L2 splits get injected
    errors and word-level annotations.  Ground-truth bookkeeping for all
    utterances lands in ``ground_truth.json``.
    """
    os.makedirs(out_dir, exist_ok=True)
    inv = config.inventory
    content = _content_ids(inv)
    words = sorted(config.lexicon)
    utterances = []
    annotations = []
    truths = []
    for split, count in sorted(config.sizes.items()):
        is_l2 = "L2" in split
        cohort = "L2" if is_l2 else "L1"
        for i in range(count):
            utt_id = f"{split}_{i:04d}"
            rng = utterance_rng(config.master_seed, utt_id)
            n_words = int(rng.integers(config.words_per_utterance[0], config.words_per_utterance[1] + 1))
            chosen = [words[int(rng.integers(len(words)))] for _ in range(n_words)]
            transcript = make_transcript([(w, config.lexicon[w][0]) for w in chosen])
            realized = _realize_words(transcript, config.variability, rng)
            if is_l2:
                realized, labels = _inject_errors_words(
                    realized, config.error_model, content, rng
                )
            else:
                labels = [0] * len(chosen)
            seq = PhonemeSeq(tuple(p for w in realized for p in w))
            pgram = emit_posteriorgram(
                seq, config.emission, inv, seed=int(rng.integers(2**63))
            )
            fname = f"{utt_id}.pgram"
            pgram_io.write_posteriorgram(pgram, inv, os.path.join(out_dir, fname))
            utterances.append(
                Utterance(
                    id=utt_id,
                    pgram=os.path.join(out_dir, fname),
                    text=" ".join(chosen),
                    speaker=f"spk{i % 10:02d}",
                    cohort=cohort,
                )
            )
            if is_l2:
                annotations.append(ErrorAnnotation(utt_id, tuple(labels)))
            truths.append(
                GroundTruth(utt_id, " ".join(chosen), tuple(seq.labels(inv)), tuple(labels))
            )
    manifest = CorpusManifest(tuple(utterances))
    pgram_io.save_manifest(manifest, os.path.join(out_dir, "manifest.json"))
    pgram_io.save_annotations(annotations, os.path.join(out_dir, "annotations.json"))
    truth_doc = {
        "ground_truth": [
            {
                "id": t.utterance_id,
                "text": t.text,
                "realized": list(t.realized_labels),
                "labels": list(t.word_labels),
            }
            for t in truths
        ]
    }
    pgram_io._atomic_json(truth_doc, os.path.join(out_dir, "ground_truth.json"))
    _write_lexicon(config.lexicon, inv, os.path.join(out_dir, "lexicon.txt"))
    return manifest, annotations, truths


def _write_lexicon(lexicon, inventory, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write("# synthetic lexicon: word<TAB>phonemes; first entry is canonical\n")
        for word in sorted(lexicon):
            for seq in lexicon[word]:
                f.write(f"{word}\t{' '.join(seq.labels(inventory))}\n")
