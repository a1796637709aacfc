"""Phoneme inventory, phoneme sequences, and word-segmented transcripts.

Every other module indexes phonemes through a :class:`PhonemeInventory`.
The inventory is a closed, ordered label set with three reserved symbols:
``pause``, ``eos`` and ``blank``.  The blank symbol is the CTC
non-emission label; it always occupies the last index and never appears
in a decoded or canonical sequence.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources

PAUSE_LABEL = "pause"
EOS_LABEL = "eos"
BLANK_LABEL = "blank"

RESERVED_LABELS = (PAUSE_LABEL, EOS_LABEL, BLANK_LABEL)


class InventoryError(ValueError):
    """Invalid phoneme inventory definition."""


class TranscriptError(ValueError):
    """Transcript text cannot be mapped onto the lexicon."""


@dataclass(frozen=True)
class PhonemeInventory:
    """Ordered, closed phoneme label set with blank at the last index."""

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @property
    def blank_id(self) -> int:
        return len(self.symbols) - 1

    @property
    def pause_id(self) -> int:
        return self._index[PAUSE_LABEL]

    @property
    def eos_id(self) -> int:
        return self._index[EOS_LABEL]

    @property
    def size(self) -> int:
        """Number of non-blank symbols (matrix width minus one)."""
        return len(self.symbols) - 1

    @property
    def width(self) -> int:
        """Posteriorgram column count: all symbols including blank."""
        return len(self.symbols)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InventoryError(f"unknown phoneme label: {label!r}") from None

    def label(self, idx: int) -> str:
        if not 0 <= idx < len(self.symbols):
            raise InventoryError(f"phoneme index out of range: {idx}")
        return self.symbols[idx]

    def is_filler(self, idx: int) -> bool:
        """True for pause/eos: non-lexical symbols excluded from word scoring."""
        return idx == self.pause_id or idx == self.eos_id

    def checksum(self) -> str:
        """Stable hex digest of the ordered label list."""
        return hashlib.sha256("\x00".join(self.symbols).encode("utf-8")).hexdigest()[:16]


def build_inventory(symbols) -> PhonemeInventory:
    """Build an inventory from labels; blank is moved to the last index.

    Labels must be unique, non-empty, whitespace-free, and contain all
    three reserved labels exactly once.
    """
    symbols = list(symbols)
    seen = set()
    for s in symbols:
        if not isinstance(s, str) or not s or any(c.isspace() for c in s):
            raise InventoryError(f"invalid phoneme label: {s!r}")
        if s in seen:
            raise InventoryError(f"duplicate phoneme label: {s!r}")
        seen.add(s)
    for r in RESERVED_LABELS:
        if r not in seen:
            raise InventoryError(f"missing reserved label: {r!r}")
    ordered = [s for s in symbols if s != BLANK_LABEL] + [BLANK_LABEL]
    return PhonemeInventory(tuple(ordered))


def default_inventory() -> PhonemeInventory:
    """The inventory shipped with the package (45 labels incl. reserved)."""
    text = resources.files("prondet.data").joinpath("default_inventory.txt").read_text("utf-8")
    labels = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return build_inventory(labels)


@dataclass(frozen=True)
class PhonemeSeq:
    """A blank-free sequence of inventory indices."""

    ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def labels(self, inventory: PhonemeInventory) -> list[str]:
        return [inventory.label(i) for i in self.ids]


def make_seq(ids, inventory: PhonemeInventory) -> PhonemeSeq:
    ids = tuple(int(i) for i in ids)
    for i in ids:
        if not 0 <= i < inventory.width:
            raise InventoryError(f"phoneme index out of range: {i}")
        if i == inventory.blank_id:
            raise InventoryError("blank may not appear in a phoneme sequence")
    return PhonemeSeq(ids)


def seq_from_labels(labels, inventory: PhonemeInventory) -> PhonemeSeq:
    return make_seq([inventory.index(l) for l in labels], inventory)


@dataclass(frozen=True)
class CanonicalTranscript:
    """Word-segmented canonical phoneme transcript.

    ``flattened_seq`` is the concatenation of the per-word sequences and
    ``word_index_of[p]`` maps flattened position ``p`` to its word index.
    """

    words: tuple[tuple[str, PhonemeSeq], ...]
    flattened_seq: PhonemeSeq
    word_index_of: tuple[int, ...]

    @property
    def num_words(self) -> int:
        return len(self.words)

    def word_slices(self) -> list[tuple[int, int]]:
        """Half-open flattened-position ranges, one per word."""
        out = []
        pos = 0
        for _, seq in self.words:
            out.append((pos, pos + len(seq)))
            pos += len(seq)
        return out


def make_transcript(words: list[tuple[str, PhonemeSeq]]) -> CanonicalTranscript:
    flat = []
    widx = []
    for k, (_, seq) in enumerate(words):
        flat.extend(seq.ids)
        widx.extend([k] * len(seq))
    return CanonicalTranscript(tuple(words), PhonemeSeq(tuple(flat)), tuple(widx))


def load_lexicon(path, inventory: PhonemeInventory) -> dict[str, list[PhonemeSeq]]:
    """Load a pronunciation lexicon: ``word<TAB>ph1 ph2 ...`` per line.

    ``#`` starts a comment line.  A word may appear on several lines;
    all its pronunciations are kept, first one is the canonical form.
    """
    lexicon: dict[str, list[PhonemeSeq]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" not in line:
                raise TranscriptError(f"{path}:{lineno}: expected 'word<TAB>phonemes'")
            word, phones = line.split("\t", 1)
            word = word.strip()
            seq = seq_from_labels(phones.split(), inventory)
            lexicon.setdefault(word, []).append(seq)
    return lexicon


def parse_transcript(line: str, lexicon: dict[str, list[PhonemeSeq]]) -> CanonicalTranscript:
    """Map a text line to its canonical word-segmented phoneme transcript.

    Uses each word's first lexicon pronunciation as the canonical form.
    Raises :class:`TranscriptError` naming the position of any word
    missing from the lexicon.
    """
    words = []
    for pos, word in enumerate(line.split()):
        prons = lexicon.get(word)
        if not prons:
            raise TranscriptError(f"out-of-vocabulary word at position {pos}: {word!r}")
        words.append((word, prons[0]))
    return make_transcript(words)
