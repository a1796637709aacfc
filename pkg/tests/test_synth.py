import json

import numpy as np
import pytest

from prondet import (
    BeamParams,
    beam_decode,
    build_inventory,
    load_annotations,
    load_manifest,
    make_transcript,
    read_posteriorgram,
    seq_from_labels,
)
from prondet.synth import (
    EmissionModel,
    ErrorModel,
    SynthError,
    VariabilityModel,
    default_config,
    emit_posteriorgram,
    generate_corpus,
    inject_errors,
    sample_native,
)


@pytest.fixture
def inv():
    return build_inventory(["a", "b", "c", "d", "pause", "eos", "blank"])


def transcript_of(inv, *word_phones):
    return make_transcript(
        [(f"w{i}", seq_from_labels(list(p), inv)) for i, p in enumerate(word_phones)]
    )


class TestSampleNative:
    def test_single_variant_is_deterministic(self, inv):
        t = transcript_of(inv, ["a", "b"])
        vm = VariabilityModel({"w0": [(seq_from_labels(["a", "b"], inv), 1.0)]})
        for seed in range(20):
            assert sample_native(t, vm, seed).labels(inv) == ["a", "b"]

    def test_variant_split_frequency(self, inv):
        t = transcript_of(inv, ["a"])
        va = seq_from_labels(["a"], inv)
        vb = seq_from_labels(["b"], inv)
        vm = VariabilityModel({"w0": [(va, 0.5), (vb, 0.5)]})
        hits = sum(sample_native(t, vm, seed).ids == va.ids for seed in range(10_000))
        assert abs(hits / 10_000 - 0.5) < 0.02

    def test_full_linking_merges_boundary_phoneme(self, inv):
        # /a b/ + /b c/ with p_link=1 -> /a b c/
        t = transcript_of(inv, ["a", "b"], ["b", "c"])
        vm = VariabilityModel(
            {
                "w0": [(seq_from_labels(["a", "b"], inv), 1.0)],
                "w1": [(seq_from_labels(["b", "c"], inv), 1.0)],
            },
            p_link=1.0,
        )
        assert sample_native(t, vm, 0).labels(inv) == ["a", "b", "c"]

    def test_uncovered_word_rejected(self, inv):
        t = transcript_of(inv, ["a"])
        with pytest.raises(SynthError, match="w0"):
            sample_native(t, VariabilityModel({}), 0)

    def test_variant_probs_must_sum_to_one(self, inv):
        with pytest.raises(SynthError, match="sum"):
            VariabilityModel({"w0": [(seq_from_labels(["a"], inv), 0.7)]})


class TestInjectErrors:
    def test_rate_zero_is_identity(self, inv):
        t = transcript_of(inv, ["a", "b"], ["c"])
        em = ErrorModel(0.0, {})
        seq, labels = inject_errors(t.flattened_seq, t, em, inv, seed=1)
        assert seq.ids == t.flattened_seq.ids
        assert labels == [0, 0]

    def test_rate_one_substitution_only_saturates(self, inv):
        t = transcript_of(inv, ["a", "b"], ["c", "d"])
        em = ErrorModel(1.0, {0: [(1, 1.0)]}, shares=(1.0, 0.0, 0.0))
        for seed in range(10):
            seq, labels = inject_errors(t.flattened_seq, t, em, inv, seed=seed)
            assert labels == [1, 1]
            assert seq.ids != t.flattened_seq.ids

    def test_label_soundness(self, inv):
        # substitution-only injection preserves word boundaries, so
        # labels must mark exactly the words whose slice changed
        t = transcript_of(inv, ["a", "b"], ["c"], ["d", "a"])
        em = ErrorModel(0.5, {0: [(1, 1.0)]}, shares=(1.0, 0.0, 0.0))
        slices = t.word_slices()
        for seed in range(50):
            seq, labels = inject_errors(t.flattened_seq, t, em, inv, seed=seed)
            for (lo, hi), label in zip(slices, labels):
                changed = seq.ids[lo:hi] != t.flattened_seq.ids[lo:hi]
                assert changed == bool(label)

    def test_empirical_rate(self, inv):
        words = [["a", "b"]] * 4
        t = transcript_of(inv, *words)
        em = ErrorModel(0.275, {0: [(1, 1.0)]})
        total = labeled = 0
        for seed in range(2500):
            _, labels = inject_errors(t.flattened_seq, t, em, inv, seed=seed)
            labeled += sum(labels)
            total += len(labels)
        assert abs(labeled / total - 0.275) < 0.01


class TestEmitPosteriorgram:
    def test_noiseless_round_trip(self, inv):
        seq = seq_from_labels(["a", "c", "b", "b", "d"], inv)
        em = EmissionModel(mean_duration=2.0, alpha=1.0, blank_rate=0.0)
        pg = emit_posteriorgram(seq, em, inv, seed=5)
        top = beam_decode(pg, BeamParams(beam_width=8, n_best=1))[0]
        assert top.seq.ids == seq.ids

    def test_alpha_is_emit_frame_posterior(self, inv):
        seq = seq_from_labels(["a"], inv)
        em = EmissionModel(mean_duration=1.0, alpha=0.34, blank_rate=0.0)
        pg = emit_posteriorgram(seq, em, inv, seed=5)
        # phoneme frames carry no blank mass, so after blank
        # renormalization the true phoneme holds exactly alpha
        row = pg.frames[0]
        assert row[inv.blank_id] == 0.0
        assert row[inv.index("a")] == pytest.approx(0.34)

    def test_validity_and_determinism(self, inv):
        seq = seq_from_labels(["a", "b", "a"], inv)
        em = EmissionModel(alpha=0.7, spread={0: [(1, 1.0)]})
        a = emit_posteriorgram(seq, em, inv, seed=9)
        b = emit_posteriorgram(seq, em, inv, seed=9)
        np.testing.assert_array_equal(a.frames, b.frames)
        np.testing.assert_allclose(a.frames.sum(axis=1), 1.0, atol=1e-9)

    def test_greedy_per_under_5pct_at_alpha_09(self):
        cfg = default_config()
        cfg = type(cfg)(**{**cfg.__dict__, "emission": EmissionModel(
            mean_duration=3.0, alpha=0.9, spread=cfg.emission.spread, blank_rate=0.3)})
        inv = cfg.inventory
        rng = np.random.default_rng(77)
        words = sorted(cfg.lexicon)
        total_ref = total_err = 0
        from prondet import align as nw_align
        from prondet.align import OpKind
        for i in range(100):
            chosen = [words[int(rng.integers(len(words)))] for _ in range(4)]
            t = make_transcript([(w, cfg.lexicon[w][0]) for w in chosen])
            pg = emit_posteriorgram(t.flattened_seq, cfg.emission, inv,
                                    seed=int(rng.integers(2**63)))
            top = beam_decode(pg, BeamParams(beam_width=8, n_best=1))[0]
            al = nw_align(t.flattened_seq, top.seq)
            errs = sum(op.kind is not OpKind.MATCH for op in al.ops)
            total_err += errs
            total_ref += len(t.flattened_seq)
        assert total_err / total_ref < 0.05


class TestGenerateCorpus:
    def test_sizes_and_annotations(self, tmp_path):
        cfg = default_config(sizes={"train_L1": 6, "test_L2": 4})
        manifest, annotations, truths = generate_corpus(cfg, tmp_path / "corpus")
        assert len(manifest.utterances) == 10
        assert len(annotations) == 4
        assert all(a.utterance_id.startswith("test_L2") for a in annotations)
        assert len(truths) == 10

    def test_regeneration_is_bit_identical(self, tmp_path):
        cfg = default_config(sizes={"train_L1": 3, "test_L2": 2})
        generate_corpus(cfg, tmp_path / "c1")
        generate_corpus(cfg, tmp_path / "c2")
        for name in sorted(p.name for p in (tmp_path / "c1").iterdir()):
            a = (tmp_path / "c1" / name).read_bytes()
            b = (tmp_path / "c2" / name).read_bytes()
            assert a == b, name

    def test_outputs_load_and_cross_validate(self, tmp_path):
        cfg = default_config(sizes={"train_L1": 3, "test_L2": 3})
        out = tmp_path / "corpus"
        generate_corpus(cfg, out)
        manifest = load_manifest(out / "manifest.json")
        annotations = load_annotations(out / "annotations.json")
        by_id = manifest.by_id()
        for ann in annotations:
            utt = by_id[ann.utterance_id]
            assert len(ann.labels) == len(utt.text.split())
        for utt in manifest.utterances:
            pg = read_posteriorgram(utt.pgram, cfg.inventory)
            assert pg.num_frames > 0

    def test_ground_truth_matches_annotations(self, tmp_path):
        cfg = default_config(sizes={"test_L2": 5})
        out = tmp_path / "corpus"
        _, annotations, truths = generate_corpus(cfg, out)
        truth_by_id = {t.utterance_id: t for t in truths}
        for ann in annotations:
            assert truth_by_id[ann.utterance_id].word_labels == ann.labels
        doc = json.loads((out / "ground_truth.json").read_text())
        assert len(doc["ground_truth"]) == 5
