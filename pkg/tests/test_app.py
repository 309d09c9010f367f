"""
Test command line
=================
End-to-end runs of the trajseg subcommands through run_command().
"""

import json

import pandas as pd
import pytest

from trajseg.app import run_command
from trajseg.storage.model_storage import load_model

SMALL_SYNTH = ["--n-trajectories", "12", "--points-per-segment", "15,20", "--segments-per-trajectory", "2,3"]


@pytest.fixture
def points(tmp_path):
    path = tmp_path / "points.csv"
    assert run_command(["synth", "--out", str(path), "--seed", "4", "--quiet", *SMALL_SYNTH]) == 0
    return path


@pytest.fixture
def unlabeled(tmp_path, points):
    path = tmp_path / "unlabeled.csv"
    pd.read_csv(points).drop(columns=["label"]).to_csv(path, index=False)
    return path


class TestPipeline:
    def test_synth_train_segment(self, tmp_path, points):
        model_path = tmp_path / "model.json"
        segments_path = tmp_path / "segments.csv"
        assert run_command(["train", "--input", str(points), "--model", str(model_path),
                            "--n-trees", "5", "--quiet"]) == 0
        assert load_model(model_path).n_trees == 5
        assert run_command(["segment", "--input", str(points), "--model", str(model_path),
                            "--out", str(segments_path), "--quiet"]) == 0
        segments = pd.read_csv(segments_path)
        assert set(segments["trajectory_id"]) == set(pd.read_csv(points)["traj_id"])
        for _, rows in segments.groupby("trajectory_id"):
            assert rows["start_index"].iloc[0] == 0
            assert (rows["start_index"].iloc[1:].values == rows["end_index"].iloc[:-1].values + 1).all()

    def test_error_signal_and_training_files(self, tmp_path, points):
        errors = tmp_path / "errors.csv"
        training = tmp_path / "training.csv"
        assert run_command(["error-signal", "--input", str(points), "--out", str(errors), "--w", "9", "--quiet"]) == 0
        assert run_command(["make-training", "--input", str(points), "--out", str(training), "--q", "5", "--quiet"]) == 0
        assert (pd.read_csv(errors)["error_m"] >= 0).all()
        assert set(pd.read_csv(training)["label"]) <= {0, 1}

    @pytest.mark.parametrize("algorithm, flags", [
        ("ows", ["--epsilon", "60"]),
        ("spd", ["--theta-d", "50", "--theta-t", "300"]),
        ("cbsmot", ["--eps", "50", "--min-time", "300"]),
    ])
    def test_baselines_segment_unlabeled_input(self, tmp_path, unlabeled, algorithm, flags):
        out = tmp_path / f"{algorithm}.csv"
        assert run_command(["segment", "--input", str(unlabeled), "--algorithm", algorithm,
                            "--out", str(out), "--quiet", *flags]) == 0
        assert len(pd.read_csv(out)) >= 12


class TestFailures:
    def test_training_needs_labels(self, tmp_path, unlabeled):
        assert run_command(["train", "--input", str(unlabeled), "--model", str(tmp_path / "m.json"), "--quiet"]) == 1
        assert not (tmp_path / "m.json").exists()

    def test_q_must_match_model(self, tmp_path, points):
        model_path = tmp_path / "model.json"
        assert run_command(["train", "--input", str(points), "--model", str(model_path), "--q", "7",
                            "--n-trees", "3", "--quiet"]) == 0
        assert run_command(["segment", "--input", str(points), "--model", str(model_path), "--q", "9",
                            "--out", str(tmp_path / "s.csv"), "--quiet"]) == 1

    def test_wsii_segment_needs_model(self, tmp_path, points):
        assert run_command(["segment", "--input", str(points), "--out", str(tmp_path / "s.csv"), "--quiet"]) == 1

    def test_ows_needs_epsilon(self, tmp_path, points):
        assert run_command(["segment", "--input", str(points), "--algorithm", "ows",
                            "--out", str(tmp_path / "s.csv"), "--quiet"]) == 1

    @pytest.mark.parametrize("argv", [
        ["explode"],
        ["synth"],
        ["synth", "--out", "x.csv", "--bogus"],
        ["error-signal", "--input", "a.csv", "--out", "b.csv", "--kernel", "spline"],
        ["synth", "--out", "x.csv", "--verbose", "--quiet"],
    ])
    def test_usage_errors(self, argv):
        assert run_command(argv) == 1

    def test_even_window(self, tmp_path, points):
        assert run_command(["error-signal", "--input", str(points), "--out", str(tmp_path / "e.csv"),
                            "--w", "8", "--quiet"]) == 1

    def test_bad_points_file(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("traj_id,t,lat,lon\na,0,95,0\n")
        assert run_command(["error-signal", "--input", str(path), "--out", str(tmp_path / "e.csv"), "--quiet"]) == 1

    def test_too_many_folds(self, tmp_path, points):
        assert run_command(["evaluate", "--input", str(points), "--out", str(tmp_path / "r.json"),
                            "--algorithm", "spd", "--folds", "20", "--quiet"]) == 1


class TestProtocolCommands:
    def test_compare_is_reproducible(self, tmp_path, points):
        argv = ["compare", "--input", str(points), "--algorithms", "ows,spd", "--folds", "3", "--quiet"]
        assert run_command([*argv, "--out", str(tmp_path / "a.json")]) == 0
        assert run_command([*argv, "--out", str(tmp_path / "b.json")]) == 0
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

        report = json.loads((tmp_path / "a.json").read_text())
        assert report["algorithm_order"] == ["ows", "spd"]
        assert [(p["a"], p["b"]) for p in report["pairwise"]] == [("ows", "spd")]
        assert len(report["algorithms"]["ows"]["fold_harmonic_means"]) == 2
        assert report["tuning_fold"] == 0

    def test_compare_with_forest_ignores_job_count(self, tmp_path, points):
        argv = ["compare", "--input", str(points), "--algorithms", "wsii,ows", "--folds", "3",
                "--n-trees", "5", "--seed", "11", "--quiet"]
        assert run_command([*argv, "--jobs", "1", "--out", str(tmp_path / "a.json")]) == 0
        assert run_command([*argv, "--jobs", "1", "--out", str(tmp_path / "b.json")]) == 0
        assert run_command([*argv, "--jobs", "2", "--out", str(tmp_path / "c.json")]) == 0
        first = (tmp_path / "a.json").read_bytes()
        assert (tmp_path / "b.json").read_bytes() == first
        assert (tmp_path / "c.json").read_bytes() == first
        assert json.loads(first)["algorithm_order"] == ["wsii", "ows"]

    def test_evaluate_wsii_with_boxplot(self, tmp_path, points):
        report_path = tmp_path / "report.json"
        boxplot = tmp_path / "box.csv"
        assert run_command(["evaluate", "--input", str(points), "--out", str(report_path), "--folds", "3",
                            "--n-trees", "5", "--boxplot-csv", str(boxplot), "--quiet"]) == 0
        report = json.loads(report_path.read_text())
        wsii = report["algorithms"]["wsii"]
        assert wsii["parameters"]["n_trees"] == 5
        assert 0.0 <= wsii["mean_harmonic"] <= 1.0
        frame = pd.read_csv(boxplot)
        assert frame["fold"].tolist() == [1, 2]
        assert set(frame["algorithm"]) == {"wsii"}

    def test_unknown_algorithm(self, tmp_path, points):
        assert run_command(["compare", "--input", str(points), "--out", str(tmp_path / "r.json"),
                            "--algorithms", "wsii,magic", "--quiet"]) == 1
