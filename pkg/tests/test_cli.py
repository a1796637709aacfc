import json
import os

import pytest

from prondet.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, _parse_grid, load_nbest, main
from prondet.synth import default_config


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    out = root / "corpus"
    rc = main([
        "synth", "--out", str(out), "--train-l1", "8", "--test-l2", "6",
    ])
    assert rc == EXIT_OK
    return out


@pytest.fixture(scope="module")
def decoded(corpus, tmp_path_factory):
    nbest = tmp_path_factory.mktemp("nbest")
    rc = main([
        "decode", "--manifest", str(corpus / "manifest.json"),
        "--out", str(nbest), "--nbest", "4", "--beam-width", "16",
    ])
    assert rc == EXIT_OK
    return nbest


@pytest.fixture(scope="module")
def pm_file(corpus, decoded, tmp_path_factory):
    out = tmp_path_factory.mktemp("pm") / "pm.json"
    rc = main([
        "train-pm", "--manifest", str(corpus / "manifest.json"),
        "--lexicon", str(corpus / "lexicon.txt"),
        "--nbest-dir", str(decoded), "--out", str(out), "--cohort", "L1",
    ])
    assert rc == EXIT_OK
    return out


class TestSynth:
    def test_writes_expected_files(self, corpus):
        for name in ("manifest.json", "annotations.json", "ground_truth.json", "lexicon.txt"):
            assert (corpus / name).exists()
        manifest = json.loads((corpus / "manifest.json").read_text())
        assert len(manifest["utterances"]) == 14


class TestDecode:
    def test_one_nbest_file_per_utterance(self, corpus, decoded):
        manifest = json.loads((corpus / "manifest.json").read_text())
        for u in manifest["utterances"]:
            doc = json.loads((decoded / f"{u['id']}.nbest.json").read_text())
            assert doc["id"] == u["id"]
            assert 1 <= len(doc["hypotheses"]) <= 4
            top = doc["hypotheses"][0]
            assert len(top["phonemes"]) == len(top["emit_frames"])

    def test_parallel_decode_matches_serial(self, corpus, decoded, tmp_path):
        rc = main([
            "decode", "--manifest", str(corpus / "manifest.json"),
            "--out", str(tmp_path), "--nbest", "4", "--workers", "2",
        ])
        assert rc == EXIT_OK
        for name in sorted(os.listdir(decoded)):
            a = json.loads((decoded / name).read_text())
            b = json.loads((tmp_path / name).read_text())
            assert a == b

    def test_load_nbest_round_trip(self, corpus, decoded):
        cfg = default_config()
        manifest = json.loads((corpus / "manifest.json").read_text())
        utt = manifest["utterances"][0]["id"]
        hyps = load_nbest(decoded / f"{utt}.nbest.json", cfg.inventory)
        assert hyps[0].weight > 0
        assert hyps[0].pos_posteriors.shape == (len(hyps[0].seq), cfg.inventory.size)

    def test_missing_pgram_is_data_error(self, corpus, tmp_path, capsys):
        doc = json.loads((corpus / "manifest.json").read_text())
        doc["utterances"][0]["pgram"] = "nonexistent.pgram"
        bad = tmp_path / "manifest.json"
        bad.write_text(json.dumps(doc))
        rc = main(["decode", "--manifest", str(bad), "--out", str(tmp_path)])
        assert rc == EXIT_DATA
        assert "nonexistent.pgram" in capsys.readouterr().err


class TestDetectEvaluateSweep:
    def detect(self, corpus, decoded, out, mode, extra=()):
        return main([
            "detect", "--manifest", str(corpus / "manifest.json"),
            "--lexicon", str(corpus / "lexicon.txt"),
            "--nbest-dir", str(decoded), "--mode", mode,
            "--cohort", "L2", "--out", str(out), *extra,
        ])

    def test_detect_all_modes_and_evaluate(self, corpus, decoded, pm_file, tmp_path):
        for mode, extra in [("nolik", ()), ("lik", ()), ("pm", ("--pm", str(pm_file)))]:
            dec = tmp_path / f"{mode}.json"
            assert self.detect(corpus, decoded, dec, mode, extra) == EXIT_OK
            doc = json.loads(dec.read_text())
            assert doc["config"]["mode"] == mode
            assert len(doc["utterances"]) == 6
            summary = tmp_path / f"{mode}.summary.json"
            rc = main([
                "evaluate", "--decisions", str(dec),
                "--annotations", str(corpus / "annotations.json"),
                "--out", str(summary),
            ])
            assert rc == EXIT_OK
            s = json.loads(summary.read_text())
            assert s["mode"] == mode
            assert sum(s["counts"].values()) > 0

    def test_pm_mode_without_model_is_usage_error(self, corpus, decoded, tmp_path, capsys):
        rc = self.detect(corpus, decoded, tmp_path / "d.json", "pm")
        assert rc == EXIT_USAGE
        assert "--pm" in capsys.readouterr().err

    def test_nbest_clamp_warns(self, corpus, decoded, tmp_path, capsys):
        rc = self.detect(corpus, decoded, tmp_path / "d.json", "lik", ("--nbest", "99"))
        assert rc == EXIT_OK
        assert "clamping" in capsys.readouterr().err

    def test_sweep_writes_curve(self, corpus, decoded, tmp_path):
        dec = tmp_path / "lik.json"
        assert self.detect(corpus, decoded, dec, "lik") == EXIT_OK
        curve = tmp_path / "curve.csv"
        rc = main([
            "sweep", "--decisions", str(dec),
            "--annotations", str(corpus / "annotations.json"),
            "--grid", "0:1:0.1", "--out", str(curve),
        ])
        assert rc == EXIT_OK
        lines = curve.read_text().splitlines()
        assert lines[0].startswith("threshold,precision")
        assert len(lines) == 12

    def test_evaluate_to_stdout(self, corpus, decoded, tmp_path, capsys):
        dec = tmp_path / "nolik.json"
        assert self.detect(corpus, decoded, dec, "nolik") == EXIT_OK
        rc = main([
            "evaluate", "--decisions", str(dec),
            "--annotations", str(corpus / "annotations.json"),
        ])
        assert rc == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["mode"] == "nolik"


class TestUsage:
    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_required_flag(self):
        assert main(["decode"]) == EXIT_USAGE

    def test_help_exits_ok(self):
        assert main(["--help"]) == EXIT_OK

    def test_grid_parser(self):
        grid = _parse_grid("0:1:0.25")
        assert grid == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
        with pytest.raises(Exception):
            _parse_grid("1:0:0.1")

    def test_train_pm_empty_cohort_is_data_error(self, corpus, decoded, tmp_path, capsys):
        rc = main([
            "train-pm", "--manifest", str(corpus / "manifest.json"),
            "--lexicon", str(corpus / "lexicon.txt"),
            "--nbest-dir", str(decoded), "--out", str(tmp_path / "pm.json"),
            "--cohort", "martian",
        ])
        assert rc == EXIT_DATA
        assert "martian" in capsys.readouterr().err
