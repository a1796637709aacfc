"""Uncertainty-aware word-level mispronunciation detection.

Pipeline: N-best CTC decoding of phoneme posteriorgrams, a statistical
pronunciation model of native phonetic variability, Needleman-Wunsch
alignment, and a word-level error detector with precision/recall
evaluation tooling.
"""

__version__ = "0.1.0"

from .align import Alignment, AlignParams, OpKind, align, oracle_align
from .decoder import BeamParams, Hypothesis, beam_decode, extract_pos_posteriors, oracle_decode
from .detect import DetectorMode, WordDecision, detect, word_error_probs
from .evaluate import (
    ConfusionCounts,
    PRPoint,
    export_curve_csv,
    matched_recall_comparison,
    precision_recall,
    score,
    summary_dict,
    sweep,
    wilson_ci,
)
from .pgram_io import (
    CorpusManifest,
    ErrorAnnotation,
    Posteriorgram,
    load_annotations,
    load_manifest,
    make_posteriorgram,
    read_posteriorgram,
    write_posteriorgram,
)
from .phonemes import (
    CanonicalTranscript,
    PhonemeInventory,
    PhonemeSeq,
    build_inventory,
    default_inventory,
    load_lexicon,
    make_seq,
    make_transcript,
    parse_transcript,
    seq_from_labels,
)
from .pm import EditTransducer, LikelihoodSeq, identity_transducer, phoneme_likelihoods
from .pm import load as load_pm
from .pm import save as save_pm
from .pm import sequence_likelihood, train
