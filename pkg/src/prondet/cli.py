"""Command-line pipeline driver.

Subcommands: synth, decode, train-pm, detect, evaluate, sweep.
Diagnostics go to stderr; data goes to files (or stdout for evaluate).
Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from . import evaluate as ev
from . import pgram_io, pm, synth
from .decoder import BeamParams, Hypothesis, beam_decode
from .detect import DetectorMode, detect
from .phonemes import (
    PhonemeInventory,
    PhonemeSeq,
    build_inventory,
    load_lexicon,
    parse_transcript,
    seq_from_labels,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _log(msg: str):
    print(msg, file=sys.stderr)


def _read_inventory(args, manifest=None) -> PhonemeInventory:
    if args.inventory:
        with open(args.inventory, encoding="utf-8") as f:
            labels = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
        return build_inventory(labels)
    if manifest and manifest.utterances:
        # infer from the first posteriorgram header
        with open(manifest.utterances[0].pgram, encoding="utf-8") as f:
            f.readline()
            return build_inventory(f.readline().split())
    raise pgram_io.ManifestError("cannot determine inventory: pass --inventory")


def _atomic_write_json(doc, path):
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    os.replace(tmp, path)


def _config_header(args, keys) -> dict:
    return {"tool": f"prondet {__version__}", **{k: getattr(args, k) for k in keys}}


# ---------------------------------------------------------------- decode

def _decode_one(task):
    pgram_path, labels, beam_width, n_best = task
    inv = build_inventory(labels)
    pgram = pgram_io.read_posteriorgram(pgram_path, inv)
    hyps = beam_decode(pgram, BeamParams(beam_width=beam_width, n_best=n_best))
    return [
        {
            "phonemes": h.seq.labels(inv),
            "log_weight": h.log_weight,
            "raw_log_prob": h.raw_log_prob,
            "emit_frames": list(h.emit_frames),
            "pos_posteriors": h.pos_posteriors.tolist(),
        }
        for h in hyps
    ]


def cmd_decode(args) -> int:
    manifest = pgram_io.load_manifest(args.manifest)
    inv = _read_inventory(args, manifest)
    os.makedirs(args.out, exist_ok=True)
    header = _config_header(args, ["beam_width", "nbest"])
    tasks = [(u.pgram, list(inv.symbols), args.beam_width, args.nbest) for u in manifest.utterances]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_decode_one, tasks))
    else:
        results = [_decode_one(t) for t in tasks]
    for u, hyps in zip(manifest.utterances, results):
        doc = {"id": u.id, "config": header, "hypotheses": hyps}
        _atomic_write_json(doc, os.path.join(args.out, f"{u.id}.nbest.json"))
    _log(f"decoded {len(manifest.utterances)} utterances -> {args.out}")
    return EXIT_OK


def load_nbest(path, inventory: PhonemeInventory) -> list[Hypothesis]:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    hyps = []
    for h in doc["hypotheses"]:
        seq = seq_from_labels(h["phonemes"], inventory)
        hyps.append(
            Hypothesis(
                seq=seq,
                log_weight=float(h["log_weight"]),
                raw_log_prob=float(h.get("raw_log_prob", h["log_weight"])),
                emit_frames=tuple(h["emit_frames"]),
                pos_posteriors=np.array(h["pos_posteriors"], dtype=np.float64).reshape(
                    len(seq), inventory.size
                ),
            )
        )
    return hyps


# ------------------------------------------------------------- train-pm

def cmd_train_pm(args) -> int:
    manifest = pgram_io.load_manifest(args.manifest)
    inv = _read_inventory(args, manifest)
    lexicon = load_lexicon(args.lexicon, inv)
    cohort = manifest.filter_cohort(args.cohort)
    if not cohort.utterances:
        raise pgram_io.ManifestError(f"no {args.cohort} utterances in manifest")
    pairs = []
    for u in cohort.utterances:
        transcript = parse_transcript(u.text, lexicon)
        hyps = load_nbest(os.path.join(args.nbest_dir, f"{u.id}.nbest.json"), inv)
        pairs.append((transcript.flattened_seq, hyps[0].seq))
    transducer = pm.train(pairs, inv, smoothing_k=args.smoothing)
    pm.save(transducer, args.out)
    _log(f"trained pronunciation model on {len(pairs)} {args.cohort} utterances -> {args.out}")
    return EXIT_OK


# --------------------------------------------------------------- detect

def cmd_detect(args) -> int:
    manifest = pgram_io.load_manifest(args.manifest)
    inv = _read_inventory(args, manifest)
    lexicon = load_lexicon(args.lexicon, inv)
    mode = DetectorMode(args.mode)
    transducer = None
    if mode is DetectorMode.PM:
        if not args.pm:
            _log("detect: PM mode requires --pm <model file>")
            return EXIT_USAGE
        transducer = pm.load(args.pm, inv)
    cohort = manifest.filter_cohort(args.cohort) if args.cohort else manifest
    out_utts = []
    for u in cohort.utterances:
        transcript = parse_transcript(u.text, lexicon)
        hyps = load_nbest(os.path.join(args.nbest_dir, f"{u.id}.nbest.json"), inv)
        n = args.nbest
        if n > len(hyps):
            _log(f"detect: {u.id}: only {len(hyps)} hypotheses available, clamping n")
            n = len(hyps)
        decisions = detect(
            hyps, transcript, inv, mode, args.threshold, n=n, transducer=transducer
        )
        out_utts.append(
            {
                "id": u.id,
                "words": [
                    {
                        "word": d.word,
                        "p_error": d.error_prob,
                        "flagged": d.flagged,
                        "per_hypothesis_probs": list(d.per_hypothesis_probs),
                    }
                    for d in decisions
                ],
            }
        )
    doc = {
        "config": _config_header(args, ["mode", "threshold", "nbest"]),
        "utterances": out_utts,
    }
    _atomic_write_json(doc, args.out)
    _log(f"detected over {len(out_utts)} utterances -> {args.out}")
    return EXIT_OK


def _load_decisions(path):
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    flags = {}
    probs = {}
    from .detect import WordDecision

    for u in doc["utterances"]:
        flags[u["id"]] = [
            WordDecision(k, w["word"], w["p_error"], tuple(w["per_hypothesis_probs"]), w["flagged"])
            for k, w in enumerate(u["words"])
        ]
        probs[u["id"]] = [w["p_error"] for w in u["words"]]
    return flags, probs


# -------------------------------------------------------------- evaluate

def cmd_evaluate(args) -> int:
    decisions, _ = _load_decisions(args.decisions)
    annotations = pgram_io.load_annotations(args.annotations)
    counts = ev.score(decisions, annotations)
    with open(args.decisions, encoding="utf-8") as f:
        mode = json.load(f)["config"].get("mode", "?")
    doc = ev.summary_dict(mode, counts)
    if args.out:
        _atomic_write_json(doc, args.out)
        _log(f"summary -> {args.out}")
    else:
        json.dump(doc, sys.stdout, indent=1)
        print()
    return EXIT_OK


def _parse_grid(spec: str):
    try:
        lo, hi, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("grid must be lo:hi:step") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("grid must be lo:hi:step with step > 0")
    n = int(round((hi - lo) / step))
    return [lo + i * step for i in range(n + 1)]


def cmd_sweep(args) -> int:
    _, probs = _load_decisions(args.decisions)
    annotations = pgram_io.load_annotations(args.annotations)
    points = ev.sweep(probs, annotations, args.grid)
    ev.export_curve_csv(points, args.out)
    _log(f"{len(points)} curve points -> {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- synth

def cmd_synth(args) -> int:
    sizes = {"train_L1": args.train_l1, "test_L2": args.test_l2}
    config = synth.default_config(
        master_seed=args.seed, word_error_rate=args.word_error_rate, sizes=sizes
    )
    manifest, annotations, _ = synth.generate_corpus(config, args.out)
    _log(
        f"generated {len(manifest.utterances)} utterances "
        f"({len(annotations)} annotated) -> {args.out}"
    )
    return EXIT_OK


# ----------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prondet", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--inventory", help="phoneme label file (default: from pgram header)")

    sp = sub.add_parser("synth", help="generate the seeded synthetic corpus")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=20260823)
    sp.add_argument("--word-error-rate", type=float, default=0.275)
    sp.add_argument("--train-l1", type=int, default=200)
    sp.add_argument("--test-l2", type=int, default=50)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("decode", help="N-best CTC decode a corpus")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--nbest", type=int, default=4)
    sp.add_argument("--beam-width", type=int, default=16, dest="beam_width")
    sp.add_argument("--workers", type=int, default=1)
    add_common(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("train-pm", help="train the pronunciation model on native speech")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--lexicon", required=True)
    sp.add_argument("--nbest-dir", required=True, dest="nbest_dir")
    sp.add_argument("--out", required=True)
    sp.add_argument("--cohort", default="L1")
    sp.add_argument("--smoothing", type=float, default=0.1)
    add_common(sp)
    sp.set_defaults(func=cmd_train_pm)

    sp = sub.add_parser("detect", help="word-level mispronunciation detection")
    sp.add_argument("--manifest", required=True)
    sp.add_argument("--lexicon", required=True)
    sp.add_argument("--nbest-dir", required=True, dest="nbest_dir")
    sp.add_argument("--mode", choices=[m.value for m in DetectorMode], required=True)
    sp.add_argument("--threshold", type=float, default=0.5)
    sp.add_argument("--nbest", type=int, default=4)
    sp.add_argument("--pm", help="pronunciation model file (PM mode)")
    sp.add_argument("--cohort", default=None)
    sp.add_argument("--out", required=True)
    add_common(sp)
    sp.set_defaults(func=cmd_detect)

    sp = sub.add_parser("evaluate", help="precision/recall of a decisions file")
    sp.add_argument("--decisions", required=True)
    sp.add_argument("--annotations", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("sweep", help="precision-recall curve over a threshold grid")
    sp.add_argument("--decisions", required=True)
    sp.add_argument("--annotations", required=True)
    sp.add_argument("--grid", type=_parse_grid, default=_parse_grid("0:1:0.01"))
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_sweep)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (pgram_io.PgramFormatError, pgram_io.ManifestError, pm.ModelError, ev.EvalError,
            synth.SynthError, ValueError, OSError) as e:
        _log(f"error: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
