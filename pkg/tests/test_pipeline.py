"""End-to-end tests for the synth/train/predict/analyze flow and its files."""

import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from uncproxy import mlp
from uncproxy.cli import main
from uncproxy.pipeline import (
    load_run_config,
    read_prediction_log,
    run_analyze,
    run_predict,
    run_synth,
    run_train,
    split_of,
)

BASE_CONFIG = {
    "paths": {"features": "data/features.csv", "labels": "data/labels.csv", "out_dir": "out"},
    "schema": {"class_names": ["c0", "c1", "c2", "c3"]},
    "train": {
        "hidden_sizes": [16, 16],
        "dropout_p": 0.3,
        "learning_rate": 0.1,
        "epochs": 4,
        "batch_size": 32,
        "seed": 11,
        "mc_samples_t": 6,
    },
    "calibration": {"bins_b": 10, "ranges_r": 10, "epsilon": 0.01, "quantiles_q": 5, "hist_bins": 10},
    "coverages": [0.5, 0.75, 1.0],
    "k_extremes": 5,
    "mode": "both",
    "synth": {
        "n_samples": 250,
        "n_classes": 4,
        "feature_dim": 2,
        "component_means": [[1.3, 1.3], [-1.3, 1.3], [-1.3, -1.3], [1.3, -1.3]],
        "component_scale": 1.0,
        "annotators_k": 10,
        "ood_fraction": 0.1,
        "ood_shift": [0.0, 2.6],
        "seed": 11,
    },
}


def write_config(tmp_path, **overrides) -> Path:
    cfg = json.loads(json.dumps(BASE_CONFIG))
    for key, value in overrides.items():
        if isinstance(value, dict) and key in cfg:
            cfg[key].update(value)
        else:
            cfg[key] = value
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def run_all(config_path) -> dict:
    cfg = load_run_config(config_path)
    run_synth(cfg)
    run_train(cfg)
    run_predict(cfg)
    return run_analyze(cfg)


class TestSplits:
    def test_split_is_deterministic(self):
        fr = (0.8, 0.1, 0.1)
        assert split_of("s000001", fr) == split_of("s000001", fr)

    def test_fractions_roughly_respected(self):
        fr = (0.8, 0.1, 0.1)
        names = [split_of(f"s{i:06d}", fr) for i in range(5000)]
        share = names.count("train") / 5000
        assert 0.75 <= share <= 0.85


class TestEndToEnd:
    def test_full_run_emits_report_and_mirrors(self, tmp_path):
        config = write_config(tmp_path)
        report = run_all(config)
        out = tmp_path / "out"
        for name in (
            "report.json",
            "reliability_baseline.csv",
            "reliability_uncnet.csv",
            "bce_percentile.csv",
            "rejection_curves.csv",
            "disagreement_histogram.csv",
            "loss_trace.json",
        ):
            assert (out / name).is_file(), name
        assert set(report["models"]) == {"baseline", "uncnet"}
        assert set(report["correlations"]) == {
            "u_aleatoric_vs_disagreement",
            "u_epistemic_vs_disagreement",
            "u_aleatoric_vs_jsd",
            "u_epistemic_vs_jsd",
            "u_total_vs_jsd",
            "u_aleatoric_vs_bce",
            "u_epistemic_vs_bce",
            "u_total_vs_bce",
        }
        assert report["paired_ttest_jsd"] is not None
        for kind in ("u_total", "u_aleatoric", "u_epistemic"):
            assert len(report["rejection_curves"][kind]) == 3
            assert len(report["rank_extremes"][kind]["lowest"]) == 5

    def test_rerun_is_byte_identical(self, tmp_path):
        config = write_config(tmp_path)
        run_all(config)
        first = {
            p.name: p.read_bytes() for p in (tmp_path / "out").iterdir() if p.suffix != ".tmp"
        }
        run_all(config)
        second = {
            p.name: p.read_bytes() for p in (tmp_path / "out").iterdir() if p.suffix != ".tmp"
        }
        assert first == second

    def test_prediction_log_matches_library_call(self, tmp_path):
        config = write_config(tmp_path)
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        log = read_prediction_log(tmp_path / "out" / "predictions_uncnet.jsonl")
        params = mlp.params_from_json((tmp_path / "out" / "params_uncnet.json").read_text())
        ids, features = [], []
        import csv

        with open(tmp_path / "data" / "features.csv", newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                ids.append(row[0])
                features.append([float(v) for v in row[1:]])
        idx = 3
        mc = mlp.mc_predict(
            params,
            np.array(features[idx]),
            cfg.train.mc_samples_t,
            cfg.train.dropout_p,
            cfg.train.seed,
            sample_index=idx,
            sample_id=ids[idx],
        )
        record = log[ids[idx]]
        np.testing.assert_array_equal(record["mc_probs"], mc.probs)
        np.testing.assert_array_equal(record["mean_probs"], mc.mean_probs)

    def test_record_count_equals_dataset_size(self, tmp_path):
        config = write_config(tmp_path)
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        log = read_prediction_log(tmp_path / "out" / "predictions_uncnet.jsonl")
        assert len(log) == BASE_CONFIG["synth"]["n_samples"]

    def test_single_pass_log_has_zero_epistemic(self, tmp_path):
        config = write_config(tmp_path, train={"mc_samples_t": 1})
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        log = read_prediction_log(tmp_path / "out" / "predictions_uncnet.jsonl")
        assert all(rec["u_epistemic"] == 0.0 for rec in log.values())

    def test_zero_epochs_params_equal_initialization(self, tmp_path):
        config = write_config(tmp_path, train={"epochs": 0})
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        params = mlp.params_from_json((tmp_path / "out" / "params_uncnet.json").read_text())
        init = mlp.init_params([2, 16, 16, 4], seed=11)
        assert mlp.params_to_json(params) == mlp.params_to_json(init)

    def test_baseline_only_marks_uncertainty_absent(self, tmp_path):
        config = write_config(tmp_path, mode="baseline")
        report = run_all(config)
        assert report["correlations"] is None
        assert report["rejection_curves"] is None
        assert report["rank_extremes"] is None
        assert report["paired_ttest_jsd"] is None
        assert any("uncertainty sections absent" in w for w in report["warnings"])
        assert "baseline" in report["models"] and "uncnet" not in report["models"]

    def test_identical_logs_surface_ttest_warning(self, tmp_path):
        config = write_config(tmp_path)
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        out = tmp_path / "out"
        # feed the uncnet log through the baseline slot as well
        log = read_prediction_log(out / "predictions_uncnet.jsonl")
        lines = [
            json.dumps({"sample_id": sid, "mean_probs": rec["mean_probs"].tolist()}, sort_keys=True)
            for sid, rec in log.items()
        ]
        (out / "predictions_baseline.jsonl").write_text("\n".join(lines) + "\n")
        report = run_analyze(cfg)
        assert report["paired_ttest_jsd"] is None
        assert any("t-test" in w for w in report["warnings"])

    def test_threaded_prediction_is_identical(self, tmp_path, monkeypatch):
        config = write_config(tmp_path)
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        serial = (tmp_path / "out" / "predictions_uncnet.jsonl").read_bytes()
        monkeypatch.setenv("UNCPROXY_THREADS", "4")
        run_predict(cfg)
        threaded = (tmp_path / "out" / "predictions_uncnet.jsonl").read_bytes()
        assert serial == threaded

    def test_mismatched_logs_raise_join_error(self, tmp_path):
        from uncproxy.errors import JoinError

        config = write_config(tmp_path)
        cfg = load_run_config(config)
        run_synth(cfg)
        run_train(cfg)
        run_predict(cfg)
        out = tmp_path / "out"
        lines = (out / "predictions_baseline.jsonl").read_text().strip().splitlines()
        (out / "predictions_baseline.jsonl").write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(JoinError):
            run_analyze(cfg)


class TestCli:
    def test_full_cli_flow(self, tmp_path, capsys):
        config = write_config(tmp_path)
        for command in ("synth", "train", "predict", "analyze"):
            assert main([command, "--config", str(config)]) == 0
        assert (tmp_path / "out" / "report.json").is_file()
        assert "analyze:" in capsys.readouterr().out

    def test_missing_config_is_usage_error(self, tmp_path, capsys):
        assert main(["synth", "--config", str(tmp_path / "nope.json")]) == 2

    def test_malformed_labels_is_data_error(self, tmp_path, capsys):
        config = write_config(tmp_path)
        assert main(["synth", "--config", str(config)]) == 0
        labels = tmp_path / "data" / "labels.csv"
        text = labels.read_text().splitlines()
        text[1] = text[1].rsplit(",", 1)[0] + ",oops"
        labels.write_text("\n".join(text) + "\n")
        assert main(["train", "--config", str(config)]) == 3

    def test_divergent_training_is_numeric_error(self, tmp_path, capsys):
        config = write_config(tmp_path, train={"learning_rate": 1e200, "epochs": 2})
        assert main(["synth", "--config", str(config)]) == 0
        assert main(["train", "--config", str(config)]) == 4
        assert "diverged" in capsys.readouterr().err

    def test_seed_override_changes_artifacts(self, tmp_path):
        config = write_config(tmp_path)
        assert main(["synth", "--config", str(config)]) == 0
        baseline = (tmp_path / "data" / "labels.csv").read_bytes()
        assert main(["synth", "--config", str(config), "--seed", "77"]) == 0
        assert (tmp_path / "data" / "labels.csv").read_bytes() != baseline

    def test_out_override_redirects_outputs(self, tmp_path):
        config = write_config(tmp_path)
        other = tmp_path / "elsewhere"
        assert main(["synth", "--config", str(config), "--out", str(other)]) == 0
        assert (other / "dataset_meta.json").is_file()


class TestPredictionLogFormat:
    def test_inconsistent_class_count_rejected(self, tmp_path):
        from uncproxy.errors import DataFormatError

        path = tmp_path / "log.jsonl"
        path.write_text(
            json.dumps({"sample_id": "a", "mean_probs": [0.5, 0.5]})
            + "\n"
            + json.dumps({"sample_id": "b", "mean_probs": [0.2, 0.3, 0.5]})
            + "\n"
        )
        with pytest.raises(DataFormatError):
            read_prediction_log(path)

    def test_inconsistent_pass_count_rejected(self, tmp_path):
        from uncproxy.errors import DataFormatError

        rec1 = {"sample_id": "a", "mean_probs": [1.0, 0.0], "mc_probs": [[1.0, 0.0]] * 3}
        rec2 = {"sample_id": "b", "mean_probs": [1.0, 0.0], "mc_probs": [[1.0, 0.0]] * 4}
        path = tmp_path / "log.jsonl"
        path.write_text(json.dumps(rec1) + "\n" + json.dumps(rec2) + "\n")
        with pytest.raises(DataFormatError):
            read_prediction_log(path)
