"""
Decoding a posteriorgram into N-best phoneme hypotheses
=======================================================

A posteriorgram is a frames x phonemes matrix of posterior
probabilities.  This demo builds a tiny one by hand, runs prefix beam
search on it, and inspects the hypotheses the decoder returns.
"""

import numpy as np

from prondet import BeamParams, beam_decode, build_inventory, make_posteriorgram

# A minimal inventory: two content phonemes plus the reserved symbols.
# The CTC blank always sits in the last column of the matrix.
inv = build_inventory(["ay", "s", "pause", "eos", "blank"])
print("inventory:", inv.symbols, "-> blank at column", inv.blank_id)

# Six frames: /ay/ held for three frames, a blank separator, then /s/.
# The second /ay/ frame is deliberately ambiguous.
frames = np.array([
    #  ay     s   pause  eos  blank
    [0.90, 0.04, 0.02, 0.02, 0.02],
    [0.48, 0.44, 0.02, 0.02, 0.04],
    [0.85, 0.05, 0.04, 0.02, 0.04],
    [0.05, 0.05, 0.02, 0.03, 0.85],
    [0.05, 0.87, 0.02, 0.02, 0.04],
    [0.06, 0.82, 0.04, 0.04, 0.04],
])
pgram = make_posteriorgram(frames, inv, frame_step_ms=10.0)

# Prefix beam search sums path probabilities per collapsed prefix, so a
# hypothesis weight aggregates every frame path that spells it.
hyps = beam_decode(pgram, BeamParams(beam_width=8, n_best=3))
for rank, h in enumerate(hyps, start=1):
    print(f"\n#{rank}  {' '.join(h.seq.labels(inv))}")
    print("   weight (normalized over the beam):", round(h.weight, 4))
    print("   raw log path-sum:", round(h.raw_log_prob, 4))
    # Each decoded phoneme keeps the frame where it contributed most,
    # plus the blank-free posterior row of that frame.
    print("   emit frames:", h.emit_frames)
    for ph, row in zip(h.seq.labels(inv), h.pos_posteriors):
        top = np.argsort(row)[::-1][:2]
        alts = ", ".join(f"{inv.label(int(i))}={row[int(i)]:.2f}" for i in top)
        print(f"     {ph}: {alts}")

# The ambiguous second frame keeps probability mass on the competing
# reading: the decoder is uncertain, and downstream stages can use it.
