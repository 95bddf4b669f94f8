"""Reliability diagrams and calibration error metrics over annotation pairs.

Samples with multiple annotators are expanded so that each
(annotation, sample) pair counts once: a sample with vote counts
(2, 1) contributes three pairs. All metrics below consume such pair
lists.

Metric family:

* ``brier``      - mean squared distance between the full predicted
  probability vector and the one-hot annotation.
* ``ece`` / ``mce`` - expected / maximum |accuracy - confidence| over
  equal-width top-label confidence bins.
* ``sce``        - like ECE but summed over every class's predicted
  probability, not just the top label.
* ``ace`` / ``tace`` - per-class equal-count confidence ranges instead
  of equal-width bins; TACE first drops confidences at or below a
  threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annotations import AnnotationRecord, LabelSchema
from .errors import EmptyInputError, InvalidInputError, JoinError


@dataclass(frozen=True)
class PairSample:
    """One annotator's vote paired with the model's prediction."""

    sample_id: str
    label_class: int
    pred_probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.pred_probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidInputError("pred_probs must be a non-empty vector")
        if not 0 <= self.label_class < probs.size:
            raise InvalidInputError(
                f"label_class {self.label_class} out of range for {probs.size} classes"
            )
        object.__setattr__(self, "pred_probs", probs)


@dataclass(frozen=True)
class ReliabilityBin:
    lo: float
    hi: float
    count: int
    avg_confidence: float  # 0.0 when the bin is empty
    accuracy: float        # 0.0 when the bin is empty


@dataclass(frozen=True)
class CalibrationConfig:
    bins_b: int = 10
    ranges_r: int = 10
    epsilon: float = 0.01

    def __post_init__(self):
        if self.bins_b < 1 or self.ranges_r < 1:
            raise InvalidInputError("bin and range counts must be >= 1")
        if not 0.0 <= self.epsilon < 1.0:
            raise InvalidInputError("epsilon must lie in [0, 1)")


@dataclass(frozen=True)
class CalibrationReport:
    bce: float
    ece: float
    mce: float
    sce: float
    ace: float
    tace: float
    bins: tuple[ReliabilityBin, ...]
    config: CalibrationConfig
    tace_skipped_classes: tuple[int, ...]  # classes with no confidence above epsilon


def expand_pairs(
    predictions,
    records,
    schema: LabelSchema,
) -> list[PairSample]:
    """Expand per-sample vote counts into one pair per annotation.

    ``predictions`` is an iterable of ``(sample_id, pred_probs)``; every
    id must have a matching record. Pair order follows prediction order,
    then class index.
    """
    by_id: dict[str, AnnotationRecord] = {}
    for record in records:
        by_id[record.sample_id] = record
    pairs: list[PairSample] = []
    for sample_id, probs in predictions:
        record = by_id.get(sample_id)
        if record is None:
            raise JoinError(f"no annotation record for sample {sample_id!r}")
        probs = np.asarray(probs, dtype=np.float64)
        counts = record.class_counts(schema)
        if probs.shape != (schema.n_classes,):
            raise InvalidInputError(
                f"prediction for {sample_id!r} has {probs.size} classes, schema has {schema.n_classes}"
            )
        for class_idx, k in enumerate(counts):
            for _ in range(int(k)):
                pairs.append(
                    PairSample(sample_id=sample_id, label_class=class_idx, pred_probs=probs)
                )
    return pairs


def _stack(pairs) -> tuple[np.ndarray, np.ndarray]:
    if not pairs:
        raise EmptyInputError("no pairs to evaluate")
    probs = np.stack([p.pred_probs for p in pairs])
    labels = np.array([p.label_class for p in pairs], dtype=np.int64)
    return probs, labels


def brier(pairs) -> float:
    """Mean squared distance between prediction vector and one-hot label."""
    probs, labels = _stack(pairs)
    diff = probs.copy()
    diff[np.arange(len(labels)), labels] -= 1.0
    return float(np.mean(np.sum(diff * diff, axis=1)))


def brier_from_counts(predictions, records, schema: LabelSchema) -> float:
    """Same statistic as ``brier`` after pair expansion, computed from counts.

    Kept as an independent path: for prediction p and k_c votes on class
    c, each pair contributes ``sum(p^2) + 1 - 2 p_c``.
    """
    by_id = {record.sample_id: record for record in records}
    total = 0.0
    n_pairs = 0
    for sample_id, probs in predictions:
        record = by_id.get(sample_id)
        if record is None:
            raise JoinError(f"no annotation record for sample {sample_id!r}")
        probs = np.asarray(probs, dtype=np.float64)
        counts = record.class_counts(schema)
        sq = float(np.sum(probs * probs))
        for class_idx, k in enumerate(counts):
            if k:
                total += int(k) * (sq + 1.0 - 2.0 * float(probs[class_idx]))
                n_pairs += int(k)
    if n_pairs == 0:
        raise EmptyInputError("no pairs to evaluate")
    return total / n_pairs


def _bin_indices(confidences: np.ndarray, b: int) -> np.ndarray:
    # half-open [lo, hi) bins with the final bin closed at 1.0
    idx = np.floor(confidences * b).astype(np.int64)
    return np.minimum(idx, b - 1)


def reliability_diagram(pairs, b: int) -> list[ReliabilityBin]:
    """Top-label confidence vs accuracy over ``b`` equal-width bins."""
    if b < 1:
        raise InvalidInputError("bin count must be >= 1")
    probs, labels = _stack(pairs)
    confidences = probs.max(axis=1)
    correct = (probs.argmax(axis=1) == labels).astype(np.float64)
    idx = _bin_indices(confidences, b)
    bins = []
    for bin_id in range(b):
        members = idx == bin_id
        count = int(members.sum())
        bins.append(
            ReliabilityBin(
                lo=bin_id / b,
                hi=(bin_id + 1) / b,
                count=count,
                avg_confidence=float(confidences[members].mean()) if count else 0.0,
                accuracy=float(correct[members].mean()) if count else 0.0,
            )
        )
    return bins


def ece(pairs, b: int) -> float:
    """Count-weighted mean |accuracy - confidence| over confidence bins."""
    bins = reliability_diagram(pairs, b)
    n = sum(bin.count for bin in bins)
    return float(
        sum(bin.count / n * abs(bin.accuracy - bin.avg_confidence) for bin in bins if bin.count)
    )


def mce(pairs, b: int) -> float:
    """Largest |accuracy - confidence| over populated confidence bins."""
    bins = reliability_diagram(pairs, b)
    gaps = [abs(bin.accuracy - bin.avg_confidence) for bin in bins if bin.count]
    return float(max(gaps))


def sce(pairs, b: int) -> float:
    """Static calibration error: ECE-style binning applied per class."""
    if b < 1:
        raise InvalidInputError("bin count must be >= 1")
    probs, labels = _stack(pairs)
    n, n_classes = probs.shape
    total = 0.0
    for class_idx in range(n_classes):
        conf = probs[:, class_idx]
        hit = (labels == class_idx).astype(np.float64)
        idx = _bin_indices(conf, b)
        for bin_id in range(b):
            members = idx == bin_id
            count = int(members.sum())
            if not count:
                continue
            gap = abs(float(hit[members].mean()) - float(conf[members].mean()))
            total += count / n * gap
    return total / n_classes


def _adaptive_ranges(order: np.ndarray, r: int):
    """Split sorted positions into r near-equal slices, longest first."""
    n = order.size
    base, extra = divmod(n, r)
    start = 0
    for range_id in range(r):
        size = base + (1 if range_id < extra else 0)
        yield order[start : start + size]
        start += size


def _adaptive_error(probs, labels, r, epsilon=None):
    n_classes = probs.shape[1]
    total = 0.0
    skipped = []
    for class_idx in range(n_classes):
        conf = probs[:, class_idx]
        keep = np.arange(conf.size)
        if epsilon is not None:
            keep = keep[conf > epsilon]
            if keep.size == 0:
                skipped.append(class_idx)
                continue
        order = keep[np.argsort(conf[keep], kind="stable")]
        for members in _adaptive_ranges(order, r):
            if members.size == 0:
                continue
            acc = float(np.mean(labels[members] == class_idx))
            avg_conf = float(np.mean(conf[members]))
            total += abs(acc - avg_conf)
    return total / (n_classes * r), tuple(skipped)


def ace(pairs, r: int) -> float:
    """Adaptive calibration error over per-class equal-count ranges."""
    if r < 1:
        raise InvalidInputError("range count must be >= 1")
    probs, labels = _stack(pairs)
    value, _ = _adaptive_error(probs, labels, r)
    return value


def tace(pairs, r: int, epsilon: float) -> float:
    """ACE restricted to confidences strictly above ``epsilon``."""
    if r < 1:
        raise InvalidInputError("range count must be >= 1")
    if not 0.0 <= epsilon < 1.0:
        raise InvalidInputError("epsilon must lie in [0, 1)")
    probs, labels = _stack(pairs)
    value, _ = _adaptive_error(probs, labels, r, epsilon=epsilon)
    return value


def calibration_report(pairs, config: CalibrationConfig | None = None) -> CalibrationReport:
    """All six calibration scalars plus the reliability bins in one pass."""
    config = config or CalibrationConfig()
    probs, labels = _stack(pairs)
    bins = reliability_diagram(pairs, config.bins_b)
    tace_value, skipped = _adaptive_error(probs, labels, config.ranges_r, epsilon=config.epsilon)
    return CalibrationReport(
        bce=brier(pairs),
        ece=ece(pairs, config.bins_b),
        mce=mce(pairs, config.bins_b),
        sce=sce(pairs, config.bins_b),
        ace=ace(pairs, config.ranges_r),
        tace=tace_value,
        bins=tuple(bins),
        config=config,
        tace_skipped_classes=skipped,
    )


def bce_vs_uncertainty_percentile(pair_groups, uncertainties, q: int) -> list[tuple[float, float]]:
    """Brier score per uncertainty-percentile group of samples.

    ``pair_groups[i]`` holds the pairs of the sample whose uncertainty is
    ``uncertainties[i]``. Samples are sorted by uncertainty (ties keep
    input order) and cut into ``q`` near-equal groups; each result entry
    is ``(upper percentile of the group, brier over its pairs)``.
    """
    groups = list(pair_groups)
    uncertainties = np.asarray(uncertainties, dtype=np.float64)
    if len(groups) == 0:
        raise EmptyInputError("no samples to group")
    if uncertainties.shape != (len(groups),):
        raise InvalidInputError("uncertainties must align with pair_groups")
    if q < 2:
        raise InvalidInputError("need at least two percentile groups")
    if q > len(groups):
        raise InvalidInputError("cannot form more groups than samples")
    order = np.argsort(uncertainties, kind="stable")
    curve = []
    seen = 0
    for members in _adaptive_ranges(order, q):
        seen += members.size
        pairs = [pair for idx in members for pair in groups[idx]]
        curve.append((100.0 * seen / len(groups), brier(pairs)))
    return curve
