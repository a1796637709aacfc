"""
From native speech to word-level mispronunciation decisions
===========================================================

The full pipeline on a small synthetic corpus: decode every utterance,
train the pronunciation model on the native (L1) split, then compare
the three detector modes on one learner (L2) utterance.
"""

import tempfile

from prondet import (
    BeamParams,
    DetectorMode,
    beam_decode,
    detect,
    load_lexicon,
    parse_transcript,
    read_posteriorgram,
    train,
)
from prondet.synth import default_config, generate_corpus

# Generate a seeded corpus: 40 native utterances to learn from, and 8
# learner utterances carrying injected mispronunciations with labels.
cfg = default_config(sizes={"train_L1": 40, "test_L2": 8})
workdir = tempfile.mkdtemp(prefix="prondet_demo_")
manifest, annotations, _ = generate_corpus(cfg, workdir)
inv = cfg.inventory
lexicon = load_lexicon(f"{workdir}/lexicon.txt", inv)

# Decode everything once; the hypotheses serve both training and
# detection.
nbest = {}
for utt in manifest.utterances:
    pgram = read_posteriorgram(utt.pgram, inv)
    nbest[utt.id] = beam_decode(pgram, BeamParams(beam_width=16, n_best=4))

# The pronunciation model is a conditional edit transducer p(r | r_c):
# for each canonical phoneme, how native speakers actually realize it.
# It is trained from alignments of decoded L1 speech against the
# canonical transcripts -- no phone-level labels needed.
pairs = []
for utt in manifest.filter_cohort("L1").utterances:
    canonical = parse_transcript(utt.text, lexicon).flattened_seq
    pairs.append((canonical, nbest[utt.id][0].seq))
transducer = train(pairs, inv, smoothing_k=0.1)

ih, ax = inv.index("ih"), inv.index("ax")
print("learned native variability, e.g. p(ax | ih) =",
      round(float(transducer.sub_probs[ih, ax]), 3))

# Pick one learner utterance and run all three modes.
utt = manifest.filter_cohort("L2").utterances[0]
labels = {a.utterance_id: a.labels for a in annotations}[utt.id]
transcript = parse_transcript(utt.text, lexicon)
print(f"\nutterance {utt.id}: '{utt.text}'  true labels {labels}")

for mode in DetectorMode:
    decisions = detect(
        nbest[utt.id], transcript, inv, mode, threshold=0.5, n=4,
        transducer=transducer if mode is DetectorMode.PM else None,
    )
    row = "  ".join(
        f"{d.word}:{d.error_prob:.2f}{'*' if d.flagged else ' '}" for d in decisions
    )
    print(f"{mode.value:>5}: {row}")

# NOLIK trusts the decoder blindly (probabilities are 0 or 1), LIK
# tempers each mismatch by the recognizer's own posterior, and PM
# additionally excuses realizations that native speakers produce too.
