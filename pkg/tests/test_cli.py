"""End-to-end CLI behavior: flows, exit codes, atomic outputs."""

import os

import numpy as np
import pytest

from tecc_screen.cli import dispatch
from tecc_screen.frontends import load_features
from tecc_screen.model import load_scores

from conftest import write_synthetic_corpus


FAST_FRONTEND = ["--num-filters", "10", "--num-ceps", "10"]
FAST_MODEL = ["--trees", "8", "--min-samples-leaf", "5"]


@pytest.fixture(scope="module")
def extracted(small_corpus, tmp_path_factory):
    """Features for the shared corpus, reused across CLI tests."""
    out = tmp_path_factory.mktemp("features")
    code = dispatch(
        ["extract", "--manifest", str(small_corpus), "--out", str(out)] + FAST_FRONTEND
    )
    assert code == 0
    return out


class TestExtract:
    def test_one_file_per_row(self, small_corpus, extracted):
        files = sorted(p.name for p in extracted.iterdir())
        assert len(files) == 24
        assert files[0].endswith(".fea1")
        m = load_features(extracted / "n000.fea1")
        assert m.num_coeffs == 30

    def test_csv_format(self, small_corpus, tmp_path):
        code = dispatch(
            ["extract", "--manifest", str(small_corpus), "--out", str(tmp_path),
             "--format", "csv"] + FAST_FRONTEND
        )
        assert code == 0
        assert (tmp_path / "p000.csv").exists()

    def test_spectral_density_outputs(self, small_corpus, tmp_path):
        feats = tmp_path / "f"
        dens = tmp_path / "d"
        code = dispatch(
            ["extract", "--manifest", str(small_corpus), "--out", str(feats),
             "--spectral-density", str(dens)] + FAST_FRONTEND
        )
        assert code == 0
        assert (dens / "p000_density.csv").exists()
        assert (dens / "p000_density.png").exists()

    def test_missing_audio_is_data_error(self, tmp_path):
        manifest = tmp_path / "m.csv"
        manifest.write_text("id,path,label,gender,nationality\nx,missing.wav,p,m,\n")
        code = dispatch(["extract", "--manifest", str(manifest), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_jobs_env_fallback(self, small_corpus, tmp_path, monkeypatch):
        monkeypatch.setenv("TECC_SCREEN_JOBS", "2")
        code = dispatch(
            ["extract", "--manifest", str(small_corpus), "--out", str(tmp_path)]
            + FAST_FRONTEND
        )
        assert code == 0
        assert len(list(tmp_path.iterdir())) == 24


class TestTrainPredictEvaluate:
    def test_full_flow(self, small_corpus, extracted, tmp_path, capsys):
        model_path = tmp_path / "model.txt"
        code = dispatch(
            ["train", "--manifest", str(small_corpus), "--features", str(extracted),
             "--model", str(model_path)] + FAST_MODEL
        )
        assert code == 0
        assert model_path.exists()

        scores_path = tmp_path / "scores.csv"
        code = dispatch(
            ["predict", "--manifest", str(small_corpus), "--features", str(extracted),
             "--model", str(model_path), "--scores", str(scores_path)]
        )
        assert code == 0
        scores = load_scores(scores_path)
        assert len(scores) == 24

        report_dir = tmp_path / "report"
        code = dispatch(
            ["evaluate", "--scores", str(scores_path), "--manifest", str(small_corpus),
             "--out", str(report_dir)]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "AUC" in out
        assert (report_dir / "roc.csv").exists()
        assert (report_dir / "roc.png").exists()
        assert (report_dir / "report.txt").exists()

    def test_repeat_train_is_byte_identical(self, small_corpus, extracted, tmp_path):
        args = ["train", "--manifest", str(small_corpus), "--features", str(extracted),
                "--seed", "4"] + FAST_MODEL
        m1, m2 = tmp_path / "m1.txt", tmp_path / "m2.txt"
        assert dispatch(args + ["--model", str(m1)]) == 0
        assert dispatch(args + ["--model", str(m2)]) == 0
        assert m1.read_bytes() == m2.read_bytes()

    def test_rf_backend_flow(self, small_corpus, extracted, tmp_path):
        model_path = tmp_path / "rf.txt"
        code = dispatch(
            ["train", "--manifest", str(small_corpus), "--features", str(extracted),
             "--model", str(model_path), "--backend", "rf", "--trees", "5"]
        )
        assert code == 0
        assert model_path.read_text().startswith("RF v1")

    def test_evaluate_missing_id(self, small_corpus, extracted, tmp_path, capsys):
        scores_path = tmp_path / "partial.csv"
        scores_path.write_text("id,score\np000,0.9\n")
        code = dispatch(
            ["evaluate", "--scores", str(scores_path), "--manifest", str(small_corpus)]
        )
        assert code == 2
        err = capsys.readouterr().err
        assert "omits" in err
        assert "p001" in err or "n000" in err

    def test_failed_train_leaves_no_output(self, small_corpus, tmp_path):
        model_path = tmp_path / "never.txt"
        code = dispatch(
            ["train", "--manifest", str(small_corpus), "--features", str(tmp_path / "void"),
             "--model", str(model_path)]
        )
        assert code == 2
        assert not model_path.exists()
        assert not list(tmp_path.glob("*.tmp*"))


class TestFuse:
    def test_weighted_fusion(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("id,score\nx,0.6\ny,0.2\n")
        b.write_text("id,score\nx,0.8\ny,0.4\n")
        out = tmp_path / "fused.csv"
        code = dispatch(["fuse", "--scores", str(a), "--scores", str(b), "--out", str(out)])
        assert code == 0
        fused = load_scores(out)
        assert fused["x"] == pytest.approx(0.7)
        assert fused["y"] == pytest.approx(0.3)

    def test_explicit_weights(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("id,score\nx,1.0\n")
        b.write_text("id,score\nx,0.0\n")
        out = tmp_path / "fused.csv"
        code = dispatch(
            ["fuse", "--scores", str(a), "--scores", str(b), "--weights", "3,1",
             "--out", str(out)]
        )
        assert code == 0
        assert load_scores(out)["x"] == pytest.approx(0.75)

    def test_single_system_is_usage_error(self, tmp_path):
        a = tmp_path / "a.csv"
        a.write_text("id,score\nx,1.0\n")
        code = dispatch(["fuse", "--scores", str(a), "--out", str(tmp_path / "o.csv")])
        assert code == 1


class TestCrossval:
    def test_outputs_and_determinism(self, small_corpus, extracted, tmp_path):
        args = [
            "crossval", "--manifest", str(small_corpus), "--features", str(extracted),
            "--folds", "3", "--seed", "11",
        ] + FAST_FRONTEND + FAST_MODEL
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        assert dispatch(args + ["--out", str(out1)]) == 0
        assert dispatch(args + ["--out", str(out2)]) == 0
        for name in ("scores.csv", "folds.csv", "report.csv", "report.txt",
                     "roc_mean.csv", "roc.svg", "roc.png"):
            assert (out1 / name).exists(), name
        assert (out1 / "roc_fold0.csv").exists()
        assert (out1 / "scores.csv").read_bytes() == (out2 / "scores.csv").read_bytes()
        assert (out1 / "report.csv").read_bytes() == (out2 / "report.csv").read_bytes()

    def test_separable_corpus_scores_high(self, small_corpus, extracted, tmp_path):
        out = tmp_path / "cv"
        code = dispatch(
            ["crossval", "--manifest", str(small_corpus), "--features", str(extracted),
             "--folds", "3", "--out", str(out)] + FAST_FRONTEND + FAST_MODEL
        )
        assert code == 0
        lines = (out / "report.csv").read_text().splitlines()
        mean = float(next(l for l in lines if l.startswith("mean,")).split(",")[1])
        assert mean >= 0.9

    def test_fold_file_input(self, small_corpus, extracted, tmp_path):
        folds = tmp_path / "folds.csv"
        rows = ["id,fold"]
        for i in range(12):
            rows.append(f"p{i:03d},{i % 2}")
            rows.append(f"n{i:03d},{i % 2}")
        folds.write_text("\n".join(rows) + "\n")
        out = tmp_path / "cv"
        code = dispatch(
            ["crossval", "--manifest", str(small_corpus), "--features", str(extracted),
             "--fold-file", str(folds), "--out", str(out)] + FAST_FRONTEND + FAST_MODEL
        )
        assert code == 0
        assert (out / "roc_fold1.csv").exists()

    def test_svg_is_self_contained(self, small_corpus, extracted, tmp_path):
        out = tmp_path / "cv"
        dispatch(
            ["crossval", "--manifest", str(small_corpus), "--features", str(extracted),
             "--folds", "3", "--out", str(out)] + FAST_FRONTEND + FAST_MODEL
        )
        svg = (out / "roc.svg").read_text()
        assert svg.startswith("<svg")
        assert 'viewBox="0 0 640 480"' in svg
        assert "<polyline" in svg
        assert "<polygon" in svg
        assert "False positive rate" in svg
        assert "href" not in svg  # no external references


class TestSearch:
    def test_search_writes_trials(self, small_corpus, extracted, tmp_path):
        out = tmp_path / "trials.csv"
        code = dispatch(
            ["search", "--manifest", str(small_corpus), "--features", str(extracted),
             "--folds", "3", "--budget", "2", "--trees", "5", "--out", str(out)]
            + FAST_FRONTEND
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("trial,")
        assert len(lines) == 3


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        assert dispatch(["frobnicate"]) == 1

    def test_missing_required_flag(self, capsys):
        assert dispatch(["extract", "--out", "x"]) == 1

    def test_bad_flag_value(self, small_corpus, tmp_path):
        code = dispatch(
            ["extract", "--manifest", str(small_corpus), "--out", str(tmp_path),
             "--num-filters", "4", "--num-ceps", "10"]
        )
        assert code == 1

    def test_help_exits_zero(self):
        assert dispatch(["--help"]) == 0

    def test_subcommand_help(self):
        assert dispatch(["crossval", "--help"]) == 0
