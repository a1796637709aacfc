"""Posteriorgram, manifest and annotation file I/O.

File formats:

* PGRAM v1 (text): line 1 ``PGRAM 1``; line 2 the inventory labels,
  space separated, blank last; line 3 ``frames=<T> step_ms=<s>``; then
  T rows of space-separated floats.  Floats are written with 17
  significant digits so that write -> read is bitwise exact.
* Manifest (JSON): ``{"utterances": [{"id", "pgram", "text", "speaker",
  "cohort"}, ...]}`` with cohort one of ``L1`` / ``L2``.
* Annotations (JSON): ``{"annotations": [{"id", "labels"}, ...]}`` with
  ``labels`` a list of 0/1 word-level mispronunciation marks.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .phonemes import PhonemeInventory, build_inventory

ROW_SUM_TOL = 1e-5

MAGIC = "PGRAM 1"


class PgramFormatError(ValueError):
    """Malformed or invariant-violating posteriorgram file."""


class ManifestError(ValueError):
    """Malformed manifest or annotation file."""


@dataclass(frozen=True)
class Posteriorgram:
    """T x width frame-level phoneme probability matrix."""

    frames: np.ndarray  # float64, shape (T, width)
    frame_step_ms: float
    inventory_hash: str

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def width(self) -> int:
        return self.frames.shape[1]


def make_posteriorgram(frames, inventory: PhonemeInventory, frame_step_ms=10.0) -> Posteriorgram:
    """Validate and wrap a probability matrix against an inventory."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 2:
        raise PgramFormatError("posteriorgram must be a 2-D matrix")
    if frames.shape[0] and frames.shape[1] != inventory.width:
        raise PgramFormatError(
            f"width {frames.shape[1]} does not match inventory width {inventory.width}"
        )
    _validate_rows(frames)
    frames = frames.copy()
    frames.setflags(write=False)
    return Posteriorgram(frames, float(frame_step_ms), inventory.checksum())


def _validate_rows(frames: np.ndarray):
    if frames.size == 0:
        return
    if np.any(frames < 0.0) or np.any(frames > 1.0):
        bad = int(np.argwhere((frames < 0.0) | (frames > 1.0))[0][0])
        raise PgramFormatError(f"probability outside [0,1] at row {bad}")
    sums = frames.sum(axis=1)
    bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
    if bad.size:
        raise PgramFormatError(
            f"row {int(bad[0])} sums to {sums[bad[0]]:.6f}, outside 1 +/- {ROW_SUM_TOL}"
        )


def write_posteriorgram(pgram: Posteriorgram, inventory: PhonemeInventory, path):
    """Write PGRAM v1; round-trips bitwise through read_posteriorgram."""
    if pgram.inventory_hash != inventory.checksum():
        raise PgramFormatError("posteriorgram was built against a different inventory")
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(MAGIC + "\n")
        f.write(" ".join(inventory.symbols) + "\n")
        f.write(f"frames={pgram.num_frames} step_ms={pgram.frame_step_ms:.17g}\n")
        for row in pgram.frames:
            f.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    os.replace(tmp, path)


def read_posteriorgram(path, inventory: PhonemeInventory) -> Posteriorgram:
    """Read and validate a PGRAM v1 file.

    Rejects (never crashes on) malformed headers, width mismatches and
    row sums beyond ROW_SUM_TOL.  Values are kept exactly as parsed;
    consumers renormalize at point of use.
    """
    with open(path, encoding="utf-8") as f:
        magic = f.readline().rstrip("\n")
        if magic != MAGIC:
            raise PgramFormatError(f"{path}: bad magic line {magic!r}")
        labels = f.readline().split()
        if labels != list(inventory.symbols):
            try:
                file_inv = build_inventory(labels)
            except Exception as e:
                raise PgramFormatError(f"{path}: bad inventory line: {e}") from None
            raise PgramFormatError(
                f"{path}: inventory mismatch (file hash {file_inv.checksum()}, "
                f"expected {inventory.checksum()})"
            )
        header = f.readline().split()
        try:
            kv = dict(item.split("=", 1) for item in header)
            n_frames = int(kv["frames"])
            step_ms = float(kv["step_ms"])
        except (ValueError, KeyError):
            raise PgramFormatError(f"{path}: malformed size header {header}") from None
        if n_frames < 0:
            raise PgramFormatError(f"{path}: negative frame count")
        rows = []
        for t in range(n_frames):
            line = f.readline()
            if not line:
                raise PgramFormatError(f"{path}: truncated at data row {t}")
            try:
                row = np.array([float(x) for x in line.split()], dtype=np.float64)
            except ValueError:
                raise PgramFormatError(f"{path}: non-numeric value in row {t}") from None
            if row.shape[0] != inventory.width:
                raise PgramFormatError(
                    f"{path}: row {t} has {row.shape[0]} columns, expected {inventory.width}"
                )
            rows.append(row)
        if f.readline().strip():
            raise PgramFormatError(f"{path}: trailing data after {n_frames} rows")
    frames = np.array(rows, dtype=np.float64) if rows else np.zeros((0, inventory.width))
    _validate_rows(frames)
    frames.setflags(write=False)
    return Posteriorgram(frames, step_ms, inventory.checksum())


@dataclass(frozen=True)
class Utterance:
    id: str
    pgram: str
    text: str
    speaker: str
    cohort: str  # "L1" or "L2"


@dataclass(frozen=True)
class CorpusManifest:
    utterances: tuple[Utterance, ...]

    def filter_cohort(self, cohort: str) -> "CorpusManifest":
        return CorpusManifest(tuple(u for u in self.utterances if u.cohort == cohort))

    def by_id(self) -> dict[str, Utterance]:
        return {u.id: u for u in self.utterances}


@dataclass(frozen=True)
class ErrorAnnotation:
    utterance_id: str
    labels: tuple[int, ...]  # 1 = mispronounced


def load_manifest(path, check_files=True) -> CorpusManifest:
    """Load a manifest; posteriorgram paths are resolved relative to it."""
    base = os.path.dirname(os.path.abspath(path))
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestError(f"{path}: {e}") from None
    if not isinstance(doc, dict) or "utterances" not in doc:
        raise ManifestError(f"{path}: missing 'utterances' key")
    utts = []
    seen = set()
    for i, entry in enumerate(doc["utterances"]):
        try:
            utt = Utterance(
                id=str(entry["id"]),
                pgram=os.path.join(base, str(entry["pgram"])),
                text=str(entry["text"]),
                speaker=str(entry["speaker"]),
                cohort=str(entry["cohort"]),
            )
        except (KeyError, TypeError) as e:
            raise ManifestError(f"{path}: utterance {i} missing field {e}") from None
        if utt.cohort not in ("L1", "L2"):
            raise ManifestError(f"{path}: utterance {utt.id}: bad cohort {utt.cohort!r}")
        if utt.id in seen:
            raise ManifestError(f"{path}: duplicate utterance id {utt.id!r}")
        seen.add(utt.id)
        if check_files and not os.path.exists(utt.pgram):
            raise ManifestError(f"{path}: utterance {utt.id}: missing file {utt.pgram}")
        utts.append(utt)
    return CorpusManifest(tuple(utts))


def save_manifest(manifest: CorpusManifest, path):
    base = os.path.dirname(os.path.abspath(path))
    doc = {
        "utterances": [
            {
                "id": u.id,
                "pgram": os.path.relpath(u.pgram, base),
                "text": u.text,
                "speaker": u.speaker,
                "cohort": u.cohort,
            }
            for u in manifest.utterances
        ]
    }
    _atomic_json(doc, path)


def load_annotations(path) -> list[ErrorAnnotation]:
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ManifestError(f"{path}: {e}") from None
    if not isinstance(doc, dict) or "annotations" not in doc:
        raise ManifestError(f"{path}: missing 'annotations' key")
    out = []
    for i, entry in enumerate(doc["annotations"]):
        try:
            labels = tuple(int(x) for x in entry["labels"])
            ann = ErrorAnnotation(str(entry["id"]), labels)
        except (KeyError, TypeError, ValueError) as e:
            raise ManifestError(f"{path}: annotation {i}: {e}") from None
        if any(l not in (0, 1) for l in labels):
            raise ManifestError(f"{path}: annotation {ann.utterance_id}: labels must be 0/1")
        out.append(ann)
    return out


def save_annotations(annotations, path):
    doc = {"annotations": [{"id": a.utterance_id, "labels": list(a.labels)} for a in annotations]}
    _atomic_json(doc, path)


def check_annotation_counts(annotations, word_counts: dict[str, int]):
    """Verify each annotation's label count against the word count map."""
    for a in annotations:
        if a.utterance_id not in word_counts:
            raise ManifestError(f"annotation for unknown utterance {a.utterance_id!r}")
        expect = word_counts[a.utterance_id]
        if len(a.labels) != expect:
            raise ManifestError(
                f"utterance {a.utterance_id!r}: {len(a.labels)} labels for {expect} words"
            )


def _atomic_json(doc, path):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    os.replace(tmp, path)
