"""Tests for the report plotting script.

A real report is produced once per session by driving the analysis CLI,
so these tests exercise the actual file interface between the two
packages.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PLOTS_DIR))

import render  # noqa: E402

CONFIG = {
    "paths": {"features": "data/features.csv", "labels": "data/labels.csv", "out_dir": "out"},
    "schema": {"class_names": ["c0", "c1", "c2", "c3"]},
    "train": {
        "hidden_sizes": [16, 16],
        "dropout_p": 0.25,
        "learning_rate": 0.1,
        "epochs": 4,
        "batch_size": 32,
        "seed": 21,
        "mc_samples_t": 6,
    },
    "calibration": {"quantiles_q": 5, "hist_bins": 10},
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
        "seed": 21,
    },
}


def _cli(*args):
    result = subprocess.run(
        [sys.executable, "-m", "uncproxy.cli", *args], capture_output=True, text=True
    )
    assert result.returncode == 0, result.stderr
    return result


@pytest.fixture(scope="session")
def report_path(tmp_path_factory) -> Path:
    tmp = tmp_path_factory.mktemp("analysis")
    config = tmp / "config.json"
    config.write_text(json.dumps(CONFIG))
    for command in ("synth", "train", "predict", "analyze"):
        _cli(command, "--config", str(config))
    return tmp / "out" / "report.json"


@pytest.fixture(scope="session")
def baseline_report_path(tmp_path_factory) -> Path:
    tmp = tmp_path_factory.mktemp("baseline_only")
    config = tmp / "config.json"
    config.write_text(json.dumps({**CONFIG, "mode": "baseline"}))
    for command in ("synth", "train", "predict", "analyze"):
        _cli(command, "--config", str(config))
    return tmp / "out" / "report.json"


class TestRenderKinds:
    @pytest.mark.parametrize("kind", render.KINDS)
    def test_every_kind_renders_png(self, report_path, tmp_path, kind):
        out = tmp_path / f"{kind}.png"
        assert render.main(["--report", str(report_path), "--kind", kind, "--out", str(out)]) == 0
        assert out.is_file() and out.stat().st_size > 1000
        assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_svg_format(self, report_path, tmp_path):
        out = tmp_path / "reliability.svg"
        code = render.main(
            ["--report", str(report_path), "--kind", "reliability", "--out", str(out),
             "--format", "svg"]
        )
        assert code == 0
        assert b"<svg" in out.read_bytes()[:500]


class TestDeterminism:
    def test_reliability_png_is_byte_identical(self, report_path, tmp_path):
        first = tmp_path / "a.png"
        second = tmp_path / "b.png"
        for out in (first, second):
            assert render.main(
                ["--report", str(report_path), "--kind", "reliability", "--out", str(out)]
            ) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_svg_is_byte_identical(self, report_path, tmp_path):
        first = tmp_path / "a.svg"
        second = tmp_path / "b.svg"
        for out in (first, second):
            assert render.main(
                ["--report", str(report_path), "--kind", "rejection", "--out", str(out),
                 "--format", "svg"]
            ) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_report_is_left_unmodified(self, report_path, tmp_path):
        before = report_path.read_bytes()
        render.main(
            ["--report", str(report_path), "--kind", "disagreement_hist",
             "--out", str(tmp_path / "h.png")]
        )
        assert report_path.read_bytes() == before


class TestErrors:
    def test_missing_uncertainty_section(self, baseline_report_path, tmp_path):
        code = render.main(
            ["--report", str(baseline_report_path), "--kind", "bce_percentile",
             "--out", str(tmp_path / "x.png")]
        )
        assert code == 3

    def test_missing_report_file(self, tmp_path):
        code = render.main(
            ["--report", str(tmp_path / "nope.json"), "--kind", "reliability",
             "--out", str(tmp_path / "x.png")]
        )
        assert code == 3

    def test_unknown_kind_is_usage_error(self, report_path, tmp_path):
        with pytest.raises(SystemExit) as exc_info:
            render.main(
                ["--report", str(report_path), "--kind", "sparkline",
                 "--out", str(tmp_path / "x.png")]
            )
        assert exc_info.value.code == 2

    def test_reliability_from_baseline_only_still_renders(self, baseline_report_path, tmp_path):
        # calibration exists for the baseline model alone
        out = tmp_path / "rel.png"
        code = render.main(
            ["--report", str(baseline_report_path), "--kind", "reliability", "--out", str(out)]
        )
        assert code == 0 and out.is_file()
