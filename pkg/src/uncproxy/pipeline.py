"""End-to-end orchestration: dataset files, training, prediction logs, reports.

This module owns every on-disk format:

* features CSV  ``id,f_0,...,f_{D-1}``
* labels CSV    ``id,<class...>[,<excluded...>]`` (integer vote counts)
* dataset sidecar JSON (generator config + shift flags)
* params JSON   (versioned, see :mod:`uncproxy.mlp`)
* prediction logs, JSON Lines, one record per sample
* analysis report JSON plus flat CSV mirrors of the plot-facing arrays

Writes are atomic (temp file + rename) and byte-deterministic for fixed
inputs and seeds: keys are sorted, floats use Python repr, and nothing
records wall-clock time.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, mlp, rng
from .annotations import (
    AnnotationRecord,
    LabelSchema,
    disagreement_histogram,
    load_labels,
    normalize_counts,
)
from .calibration import (
    CalibrationConfig,
    bce_vs_uncertainty_percentile,
    calibration_report,
    expand_pairs,
)
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateInputError,
    JoinError,
    UncproxyError,
)
from .evaluation import accuracy, jsd, paired_ttest, pearson, rank_extremes, rejection_curve
from .synth import SynthConfig, generate
from .uncertainty import McPrediction, decompose

MODES = ("baseline", "uncnet", "both")
SPLITS = ("train", "val", "test")
UNCERTAINTY_KINDS = ("u_total", "u_aleatoric", "u_epistemic")

THREADS_ENV = "UNCPROXY_THREADS"


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisConfig:
    bins_b: int = 10
    ranges_r: int = 10
    epsilon: float = 0.01
    quantiles_q: int = 10
    hist_bins: int = 20

    def calibration(self) -> CalibrationConfig:
        return CalibrationConfig(bins_b=self.bins_b, ranges_r=self.ranges_r, epsilon=self.epsilon)


@dataclass(frozen=True)
class RunConfig:
    features_path: Path
    labels_path: Path
    out_dir: Path
    schema: LabelSchema
    train: mlp.TrainConfig
    hidden_sizes: tuple[int, ...]
    analysis: AnalysisConfig
    coverages: tuple[float, ...]
    k_extremes: int
    mode: str
    split_fractions: tuple[float, float, float]
    analyze_split: str  # "all" or one of SPLITS
    synth: SynthConfig | None
    raw: dict = field(repr=False, default_factory=dict)  # config echo for reports


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def load_run_config(
    path,
    mode: str | None = None,
    out_dir=None,
    seed: int | None = None,
) -> RunConfig:
    """Parse and validate a run-config JSON file.

    Relative paths are resolved against the config file's directory.
    ``mode``, ``out_dir``, and ``seed`` mirror the CLI overrides.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "config root must be a JSON object")

    base = path.parent

    def _resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    paths = raw.get("paths", {})
    _require(isinstance(paths, dict), "'paths' must be an object")
    _require("features" in paths and "labels" in paths and "out_dir" in paths,
             "'paths' needs features, labels, and out_dir")

    schema_raw = raw.get("schema", {})
    _require(isinstance(schema_raw, dict) and schema_raw.get("class_names"),
             "'schema.class_names' is required")
    try:
        schema = LabelSchema(
            class_names=tuple(schema_raw["class_names"]),
            excluded_columns=tuple(schema_raw.get("excluded_columns", ())),
        )
    except UncproxyError as exc:
        raise ConfigError(f"bad schema: {exc}") from exc

    train_raw = dict(raw.get("train", {}))
    hidden = tuple(int(h) for h in train_raw.pop("hidden_sizes", (128, 128)))
    if seed is not None:
        train_raw["seed"] = seed
    try:
        train = mlp.TrainConfig(**{k: v for k, v in train_raw.items()})
    except TypeError as exc:
        raise ConfigError(f"bad train block: {exc}") from exc
    except UncproxyError as exc:
        raise ConfigError(f"bad train block: {exc}") from exc

    try:
        analysis = AnalysisConfig(**raw.get("calibration", {}))
    except TypeError as exc:
        raise ConfigError(f"bad calibration block: {exc}") from exc
    except UncproxyError as exc:
        raise ConfigError(f"bad calibration block: {exc}") from exc

    coverages = tuple(float(c) for c in raw.get("coverages", (0.25, 0.5, 0.75, 0.9, 1.0)))
    k_extremes = int(raw.get("k_extremes", 10))
    _require(k_extremes >= 0, "k_extremes must be non-negative")

    effective_mode = mode or raw.get("mode", "both")
    _require(effective_mode in MODES, f"mode must be one of {MODES}")

    splits_raw = raw.get("splits", {"train": 0.8, "val": 0.1, "test": 0.1})
    fractions = tuple(float(splits_raw.get(name, 0.0)) for name in SPLITS)
    _require(all(v >= 0 for v in fractions) and abs(sum(fractions) - 1.0) < 1e-9,
             "split fractions must be non-negative and sum to 1")

    analyze_split = raw.get("analyze_split", "all")
    _require(analyze_split in ("all",) + SPLITS, "analyze_split must be 'all' or a split name")

    synth_cfg = None
    if "synth" in raw:
        synth_raw = dict(raw["synth"])
        if seed is not None:
            synth_raw["seed"] = seed
        if "component_means" in synth_raw:
            synth_raw["component_means"] = np.asarray(synth_raw["component_means"], dtype=np.float64)
        if synth_raw.get("ood_shift") is not None:
            synth_raw["ood_shift"] = np.asarray(synth_raw["ood_shift"], dtype=np.float64)
        try:
            synth_cfg = SynthConfig(**synth_raw)
        except TypeError as exc:
            raise ConfigError(f"bad synth block: {exc}") from exc
        except UncproxyError as exc:
            raise ConfigError(f"bad synth block: {exc}") from exc

    echo = dict(raw)
    if seed is not None:
        echo.setdefault("overrides", {})["seed"] = seed
    if mode is not None:
        echo.setdefault("overrides", {})["mode"] = mode
    if out_dir is not None:
        echo.setdefault("overrides", {})["out_dir"] = str(out_dir)

    return RunConfig(
        features_path=_resolve(paths["features"]),
        labels_path=_resolve(paths["labels"]),
        out_dir=_resolve(out_dir) if out_dir is not None else _resolve(paths["out_dir"]),
        schema=schema,
        train=train,
        hidden_sizes=hidden,
        analysis=analysis,
        coverages=coverages,
        k_extremes=k_extremes,
        mode=effective_mode,
        split_fractions=fractions,
        analyze_split=analyze_split,
        synth=synth_cfg,
        raw=echo,
    )


# ---------------------------------------------------------------------------
# Atomic, deterministic writers
# ---------------------------------------------------------------------------

def _atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path, obj):
    _atomic_write_text(Path(path), json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


def write_csv(path, header: list[str], rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(repr(float(cell)))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Dataset files
# ---------------------------------------------------------------------------

def write_dataset_files(dataset, config: SynthConfig, schema: LabelSchema,
                        features_path, labels_path, sidecar_path):
    feat_header = ["id"] + [f"f_{d}" for d in range(dataset.features.shape[1])]
    write_csv(
        features_path,
        feat_header,
        ([sid, *row] for sid, row in zip(dataset.sample_ids, dataset.features)),
    )
    write_csv(
        labels_path,
        ["id", *schema.columns],
        ([sid, *map(int, row)] for sid, row in zip(dataset.sample_ids, dataset.annotation_counts)),
    )
    write_json(
        sidecar_path,
        {
            "generator": {
                "n_samples": config.n_samples,
                "n_classes": config.n_classes,
                "feature_dim": config.feature_dim,
                "component_means": config.component_means,
                "component_scale": config.component_scale,
                "annotators_k": config.annotators_k,
                "ood_fraction": config.ood_fraction,
                "ood_shift": config.ood_shift,
                "seed": config.seed,
            },
            "sample_ids": list(dataset.sample_ids),
            "is_ood": dataset.is_ood,
        },
    )


def load_features(path) -> tuple[list[str], np.ndarray]:
    """Read a features CSV into (sample_ids, (N, D) array)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"features file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "id":
            raise DataFormatError(f"{path}: first column must be 'id'")
        dim = len(header) - 1
        if dim < 1:
            raise DataFormatError(f"{path}: no feature columns")
        ids, rows = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise DataFormatError(f"{path}:{line_no}: expected {dim + 1} cells, found {len(row)}")
            try:
                rows.append([float(c) for c in row[1:]])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{line_no}: {exc}") from exc
            ids.append(row[0])
    if not ids:
        raise DataFormatError(f"{path}: no data rows")
    return ids, np.asarray(rows, dtype=np.float64)


def split_of(sample_id: str, fractions: tuple[float, float, float]) -> str:
    """Deterministic split assignment by hashing the sample id."""
    digest = hashlib.sha256(sample_id.encode("utf-8")).digest()
    u = int.from_bytes(digest[:8], "big") / 2.0**64
    if u < fractions[0]:
        return "train"
    if u < fractions[0] + fractions[1]:
        return "val"
    return "test"


def _load_soft_labels(cfg: RunConfig) -> dict[str, object]:
    records = load_labels(cfg.labels_path, cfg.schema)
    return {rec.sample_id: rec for rec in records}


def _build_dataset(cfg: RunConfig, subset: str | None) -> mlp.Dataset:
    ids, features = load_features(cfg.features_path)
    records = _load_soft_labels(cfg)
    keep_ids, keep_rows, labels = [], [], []
    for idx, sid in enumerate(ids):
        if subset is not None and split_of(sid, cfg.split_fractions) != subset:
            continue
        record = records.get(sid)
        if record is None:
            raise JoinError(f"sample {sid!r} has features but no annotation row")
        keep_ids.append(sid)
        keep_rows.append(features[idx])
        labels.append(normalize_counts(record, cfg.schema).probs)
    if not keep_ids:
        raise DataFormatError(f"no samples in subset {subset!r}")
    return mlp.Dataset(
        features=np.asarray(keep_rows), soft_labels=np.asarray(labels), sample_ids=tuple(keep_ids)
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _modes(cfg: RunConfig) -> list[str]:
    return ["baseline", "uncnet"] if cfg.mode == "both" else [cfg.mode]


def params_path(cfg: RunConfig, mode: str) -> Path:
    return cfg.out_dir / f"params_{mode}.json"


def predictions_path(cfg: RunConfig, mode: str) -> Path:
    return cfg.out_dir / f"predictions_{mode}.jsonl"


def run_synth(cfg: RunConfig) -> dict:
    """Generate the configured dataset and write its three files."""
    if cfg.synth is None:
        raise ConfigError("config has no 'synth' block")
    if cfg.synth.n_classes != cfg.schema.n_classes:
        raise ConfigError("synth.n_classes must match the schema class count")
    dataset = generate(cfg.synth)
    sidecar = cfg.out_dir / "dataset_meta.json"
    write_dataset_files(dataset, cfg.synth, cfg.schema, cfg.features_path, cfg.labels_path, sidecar)
    soft = [normalize_counts(AnnotationRecord(sid, tuple(map(int, row))), cfg.schema)
            for sid, row in zip(dataset.sample_ids, dataset.annotation_counts)]
    mean_d = float(np.mean([s.disagreement for s in soft]))
    return {
        "n_samples": dataset.n_samples,
        "n_classes": cfg.synth.n_classes,
        "mean_disagreement": mean_d,
        "n_ood": int(dataset.is_ood.sum()),
        "files": [str(cfg.features_path), str(cfg.labels_path), str(sidecar)],
    }


def run_train(cfg: RunConfig) -> dict:
    """Train on the train split and write params for each requested mode.

    The two modes share one trained network; they differ only in how
    inference is run later, so their params files have equal content.
    """
    dataset = _build_dataset(cfg, "train")
    result = mlp.train(dataset, cfg.train, cfg.hidden_sizes)
    doc = mlp.params_to_json(result.params)
    written = []
    for mode in _modes(cfg):
        path = params_path(cfg, mode)
        _atomic_write_text(path, doc)
        written.append(str(path))
    write_json(
        cfg.out_dir / "loss_trace.json",
        {
            "loss_trace": list(result.loss_trace),
            "n_train_samples": dataset.n_samples,
            "hidden_sizes": list(cfg.hidden_sizes),
            "train_config": {
                "dropout_p": cfg.train.dropout_p,
                "learning_rate": cfg.train.learning_rate,
                "epochs": cfg.train.epochs,
                "batch_size": cfg.train.batch_size,
                "weight_decay": cfg.train.resolve_weight_decay(dataset.n_samples),
                "seed": cfg.train.seed,
                "mc_samples_t": cfg.train.mc_samples_t,
            },
        },
    )
    return {
        "n_train_samples": dataset.n_samples,
        "final_loss": result.loss_trace[-1] if result.loss_trace else None,
        "files": written,
    }


def _n_workers() -> int:
    value = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {value!r}")
    if n < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0")
    return n or (os.cpu_count() or 1)


def run_predict(cfg: RunConfig) -> dict:
    """Write a JSON Lines prediction log over the full dataset per mode."""
    dataset = _build_dataset(cfg, None)
    written = []
    for mode in _modes(cfg):
        ppath = params_path(cfg, mode)
        if not ppath.is_file():
            raise ConfigError(f"params file not found (run train first): {ppath}")
        params = mlp.params_from_json(ppath.read_text(encoding="utf-8"))
        if mode == "baseline":
            logits = mlp.forward(params, dataset.features)
            probs = mlp.softmax(logits)
            lines = [
                json.dumps(
                    {"sample_id": sid, "mean_probs": row.tolist()}, sort_keys=True
                )
                for sid, row in zip(dataset.sample_ids, probs)
            ]
        else:
            t = cfg.train.mc_samples_t

            def one(idx: int) -> str:
                mc = mlp.mc_predict(
                    params,
                    dataset.features[idx],
                    t,
                    cfg.train.dropout_p,
                    cfg.train.seed,
                    sample_index=idx,
                    sample_id=dataset.sample_ids[idx],
                )
                triple = decompose(mc)
                return json.dumps(
                    {
                        "sample_id": mc.sample_id,
                        "mc_probs": mc.probs.tolist(),
                        "mean_probs": mc.mean_probs.tolist(),
                        "u_total": triple.u_total,
                        "u_aleatoric": triple.u_aleatoric,
                        "u_epistemic": triple.u_epistemic,
                    },
                    sort_keys=True,
                )

            workers = _n_workers()
            indices = range(dataset.n_samples)
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    lines = list(pool.map(one, indices))
            else:
                lines = [one(i) for i in indices]
        path = predictions_path(cfg, mode)
        _atomic_write_text(path, "\n".join(lines) + "\n")
        written.append(str(path))
    return {"n_samples": dataset.n_samples, "files": written}


def read_prediction_log(path) -> dict:
    """Load a JSONL prediction log into {sample_id: record}, validating shape."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"prediction log not found: {path}")
    records: dict[str, dict] = {}
    n_classes = None
    n_passes = None
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            if "sample_id" not in rec or "mean_probs" not in rec:
                raise DataFormatError(f"{path}:{line_no}: record needs sample_id and mean_probs")
            mean = np.asarray(rec["mean_probs"], dtype=np.float64)
            if n_classes is None:
                n_classes = mean.size
            elif mean.size != n_classes:
                raise DataFormatError(f"{path}:{line_no}: inconsistent class count")
            if "mc_probs" in rec:
                probs = np.asarray(rec["mc_probs"], dtype=np.float64)
                if probs.ndim != 2 or probs.shape[1] != n_classes:
                    raise DataFormatError(f"{path}:{line_no}: mc_probs shape mismatch")
                if n_passes is None:
                    n_passes = probs.shape[0]
                elif probs.shape[0] != n_passes:
                    raise DataFormatError(f"{path}:{line_no}: inconsistent pass count")
                rec["mc_probs"] = probs
            rec["mean_probs"] = mean
            records[rec["sample_id"]] = rec
    if not records:
        raise DataFormatError(f"{path}: log is empty")
    return records


def _correlation_entry(name, x, y, out: dict, warnings: list):
    try:
        res = pearson(x, y)
        out[name] = {"r": res.r, "p_value": res.p_value, "n": res.n}
    except (DegenerateInputError, UncproxyError) as exc:
        out[name] = None
        warnings.append(f"correlation {name} unavailable: {exc}")


def run_analyze(cfg: RunConfig) -> dict:
    """Join logs with annotations and emit the full report (JSON + CSVs)."""
    records_by_id = _load_soft_labels(cfg)
    ids_all, _ = load_features(cfg.features_path)
    if cfg.analyze_split == "all":
        ids = list(ids_all)
    else:
        ids = [i for i in ids_all if split_of(i, cfg.split_fractions) == cfg.analyze_split]
    if not ids:
        raise DataFormatError(f"no samples in analyze split {cfg.analyze_split!r}")

    logs = {}
    for mode in _modes(cfg):
        logs[mode] = read_prediction_log(predictions_path(cfg, mode))

    if len(logs) == 2:
        only_b = sorted(set(logs["baseline"]) - set(logs["uncnet"]))[:5]
        only_u = sorted(set(logs["uncnet"]) - set(logs["baseline"]))[:5]
        if only_b or only_u:
            raise JoinError(
                f"prediction logs cover different samples; baseline-only={only_b}, uncnet-only={only_u}"
            )
    for mode, log in logs.items():
        missing = [i for i in ids if i not in log][:5]
        if missing:
            raise JoinError(f"{mode} log is missing analyzed samples, e.g. {missing}")

    soft_labels = []
    for sid in ids:
        record = records_by_id.get(sid)
        if record is None:
            raise JoinError(f"sample {sid!r} has no annotation row")
        soft_labels.append(normalize_counts(record, cfg.schema))
    d_values = [s.disagreement for s in soft_labels]
    edges, densities = disagreement_histogram(d_values, cfg.analysis.hist_bins)

    warnings: list[str] = []
    report: dict = {
        "library_version": __version__,
        "config": cfg.raw,
        "split": cfg.analyze_split,
        "n_samples": len(ids),
        "n_classes": cfg.schema.n_classes,
        "annotation": {
            "mean_disagreement": float(np.mean(d_values)),
            "histogram": {"bin_edges": edges, "densities": densities},
        },
        "models": {},
        "correlations": None,
        "bce_vs_uncertainty_percentile": None,
        "rejection_curves": None,
        "rank_extremes": None,
        "paired_ttest_jsd": None,
        "warnings": warnings,
    }

    jsd_by_mode = {}
    records_list = [records_by_id[sid] for sid in ids]
    for mode, log in logs.items():
        preds = [(sid, log[sid]["mean_probs"]) for sid in ids]
        pairs = expand_pairs(preds, records_list, cfg.schema)
        calib = calibration_report(pairs, cfg.analysis.calibration())
        jsd_values = [
            jsd(soft.probs, log[sid]["mean_probs"]) for sid, soft in zip(ids, soft_labels)
        ]
        jsd_by_mode[mode] = jsd_values
        report["models"][mode] = {
            "accuracy_pct": accuracy([p for _, p in preds], soft_labels),
            "jsd_mean": float(np.mean(jsd_values)),
            "jsd_sd": float(np.std(jsd_values, ddof=1)) if len(jsd_values) > 1 else 0.0,
            "n_pairs": len(pairs),
            "calibration": {
                "bce": calib.bce,
                "ece": calib.ece,
                "mce": calib.mce,
                "sce": calib.sce,
                "ace": calib.ace,
                "tace": calib.tace,
                "tace_skipped_classes": list(calib.tace_skipped_classes),
                "config": {
                    "bins_b": calib.config.bins_b,
                    "ranges_r": calib.config.ranges_r,
                    "epsilon": calib.config.epsilon,
                },
                "bins": [
                    {
                        "lo": b.lo,
                        "hi": b.hi,
                        "count": b.count,
                        "avg_confidence": b.avg_confidence,
                        "accuracy": b.accuracy,
                    }
                    for b in calib.bins
                ],
            },
        }
        write_csv(
            cfg.out_dir / f"reliability_{mode}.csv",
            ["lo", "hi", "count", "avg_confidence", "accuracy"],
            ([b.lo, b.hi, b.count, b.avg_confidence, b.accuracy] for b in calib.bins),
        )

    if "uncnet" in logs:
        log = logs["uncnet"]
        triples = {
            kind: [float(log[sid][kind]) for sid in ids] for kind in UNCERTAINTY_KINDS
        }
        uncnet_preds = [log[sid]["mean_probs"] for sid in ids]
        jsd_values = jsd_by_mode["uncnet"]

        correlations: dict = {}
        _correlation_entry("u_aleatoric_vs_disagreement", triples["u_aleatoric"], d_values, correlations, warnings)
        _correlation_entry("u_epistemic_vs_disagreement", triples["u_epistemic"], d_values, correlations, warnings)
        _correlation_entry("u_aleatoric_vs_jsd", triples["u_aleatoric"], jsd_values, correlations, warnings)
        _correlation_entry("u_epistemic_vs_jsd", triples["u_epistemic"], jsd_values, correlations, warnings)
        _correlation_entry("u_total_vs_jsd", triples["u_total"], jsd_values, correlations, warnings)

        pair_groups = [
            expand_pairs([(sid, log[sid]["mean_probs"])], [records_by_id[sid]], cfg.schema)
            for sid in ids
        ]
        bce_sections = {}
        for kind in UNCERTAINTY_KINDS:
            curve = bce_vs_uncertainty_percentile(pair_groups, triples[kind], cfg.analysis.quantiles_q)
            bce_sections[kind] = [{"percentile": pct, "bce": val} for pct, val in curve]
            _correlation_entry(
                f"{kind}_vs_bce",
                [pct for pct, _ in curve],
                [val for _, val in curve],
                correlations,
                warnings,
            )
        report["bce_vs_uncertainty_percentile"] = bce_sections
        write_csv(
            cfg.out_dir / "bce_percentile.csv",
            ["u_kind", "percentile", "bce"],
            (
                [kind, entry["percentile"], entry["bce"]]
                for kind in UNCERTAINTY_KINDS
                for entry in bce_sections[kind]
            ),
        )

        rejection = {}
        for kind in UNCERTAINTY_KINDS:
            curve = rejection_curve(uncnet_preds, soft_labels, triples[kind], cfg.coverages)
            rejection[kind] = [
                {"coverage": p.coverage, "accuracy": p.accuracy, "n_kept": p.n_kept}
                for p in curve.points
            ]
        report["rejection_curves"] = rejection
        write_csv(
            cfg.out_dir / "rejection_curves.csv",
            ["u_kind", "coverage", "accuracy", "n_kept"],
            (
                [kind, e["coverage"], e["accuracy"], e["n_kept"]]
                for kind in UNCERTAINTY_KINDS
                for e in rejection[kind]
            ),
        )

        k = min(cfg.k_extremes, len(ids))
        extremes = {}
        for kind in UNCERTAINTY_KINDS:
            lowest, highest = rank_extremes(triples[kind], k, ids=ids)
            extremes[kind] = {"lowest": lowest, "highest": highest}
        report["rank_extremes"] = extremes
        report["correlations"] = correlations
    else:
        warnings.append("uncertainty sections absent: no uncnet prediction log in this run")

    if set(logs) == {"baseline", "uncnet"}:
        try:
            t_res = paired_ttest(jsd_by_mode["baseline"], jsd_by_mode["uncnet"])
            report["paired_ttest_jsd"] = {
                "t_statistic": t_res.t_statistic,
                "df": t_res.df,
                "p_value": t_res.p_value,
                "direction": "baseline_minus_uncnet",
            }
        except DegenerateInputError as exc:
            warnings.append(f"paired t-test unavailable: {exc}")

    write_csv(
        cfg.out_dir / "disagreement_histogram.csv",
        ["bin_lo", "bin_hi", "density"],
        ([edges[i], edges[i + 1], densities[i]] for i in range(len(densities))),
    )
    write_json(cfg.out_dir / "report.json", report)
    return report
