#!/usr/bin/env python3
"""Drive the whole command-line pipeline and render the figures.

Creates a run config in ./demo_run/, executes
``synth -> train -> predict -> analyze``, prints the headline numbers
from the report, and (if matplotlib is installed) renders all four
figure kinds with plots/render.py.

Run:  python3 demos/05_cli_pipeline.py  (~10 s)
"""

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
RUN_DIR = Path("demo_run")
RUN_DIR.mkdir(exist_ok=True)

config = {
    "paths": {"features": "data/features.csv", "labels": "data/labels.csv", "out_dir": "out"},
    "schema": {"class_names": ["c0", "c1", "c2", "c3"]},
    "train": {
        "hidden_sizes": [32, 32],
        "dropout_p": 0.25,
        "learning_rate": 0.1,
        "epochs": 15,
        "batch_size": 64,
        "seed": 12,
        "mc_samples_t": 20,
    },
    "calibration": {"bins_b": 10, "ranges_r": 10, "epsilon": 0.01, "quantiles_q": 10, "hist_bins": 15},
    "coverages": [0.5, 0.75, 0.9, 1.0],
    "k_extremes": 8,
    "mode": "both",
    "synth": {
        "n_samples": 1500,
        "n_classes": 4,
        "feature_dim": 2,
        "component_means": [[1.3, 1.3], [-1.3, 1.3], [-1.3, -1.3], [1.3, -1.3]],
        "component_scale": 1.0,
        "annotators_k": 10,
        "ood_fraction": 0.1,
        "ood_shift": [0.0, 2.6],
        "seed": 12,
    },
}
config_path = RUN_DIR / "config.json"
config_path.write_text(json.dumps(config, indent=2))

for command in ("synth", "train", "predict", "analyze"):
    print(f"$ uncproxy {command} --config {config_path}")
    subprocess.run(
        [sys.executable, "-m", "uncproxy.cli", command, "--config", str(config_path)],
        check=True,
    )

report = json.loads((RUN_DIR / "out" / "report.json").read_text())
print("\n--- report highlights ---")
for name, entry in report["models"].items():
    cal = entry["calibration"]
    print(
        f"{name:9s} acc={entry['accuracy_pct']:6.2f}%  jsd={entry['jsd_mean']:.4f}  "
        f"bce={cal['bce']:.4f}  ece={cal['ece']:.4f}"
    )
corr = report["correlations"]["u_aleatoric_vs_disagreement"]
print(f"corr(aleatoric, disagreement): r={corr['r']:.3f}, p={corr['p_value']:.2g}")
ttest = report["paired_ttest_jsd"]
if ttest:
    print(f"paired t-test on per-sample JSD: t({ttest['df']})={ttest['t_statistic']:.3f}")

try:
    import matplotlib  # noqa: F401
except ImportError:
    print("\nmatplotlib not installed; skipping figure rendering")
    sys.exit(0)

print("\n--- rendering figures ---")
for kind in ("reliability", "bce_percentile", "disagreement_hist", "rejection"):
    out = RUN_DIR / f"{kind}.png"
    subprocess.run(
        [
            sys.executable,
            str(ROOT / "plots" / "render.py"),
            "--report", str(RUN_DIR / "out" / "report.json"),
            "--kind", kind,
            "--out", str(out),
        ],
        check=True,
    )
    print(f"wrote {out}")
