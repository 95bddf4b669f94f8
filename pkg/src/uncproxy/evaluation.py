"""Distributional performance, statistical tests, and selective prediction.

Divergences are in nats. P-values come from the Student-t CDF expressed
through the regularized incomplete beta function, so small-n results are
exact rather than normal approximations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import (
    DegenerateInputError,
    EmptyInputError,
    InvalidCoverageError,
    InvalidInputError,
)

KL_FLOOR = 1e-12  # clip for the reference distribution inside logs


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    df: int
    p_value: float


@dataclass(frozen=True)
class RejectionPoint:
    coverage: float
    accuracy: float  # fraction in [0, 1]
    n_kept: int


@dataclass(frozen=True)
class RejectionCurve:
    points: tuple[RejectionPoint, ...]


def _check_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.ndim != 1 or q.ndim != 1 or p.shape != q.shape or p.size == 0:
        raise InvalidInputError("p and q must be non-empty vectors of equal length")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
        raise InvalidInputError("p and q must be finite")
    return p, q


def kl_divergence(p, q) -> float:
    """KL(p || q) in nats with q clipped at 1e-12 and 0·log 0 = 0."""
    p, q = _check_pair(p, q)
    q = np.clip(q, KL_FLOOR, None)
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def jsd(p, q) -> float:
    """Jensen-Shannon divergence in nats; symmetric, bounded by ln 2."""
    p, q = _check_pair(p, q)
    m = 0.5 * (p + q)
    return 0.5 * (kl_divergence(p, m) + kl_divergence(q, m))


def _student_t_two_sided_p(t: float, df: int) -> float:
    """P(|T_df| >= |t|) via the regularized incomplete beta function."""
    if not np.isfinite(t):
        return 0.0
    t2 = t * t
    return float(betainc(df / 2.0, 0.5, df / (df + t2)))


def pearson(x, y) -> CorrelationResult:
    """Sample Pearson correlation with a two-sided Student-t p-value."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise InvalidInputError("x and y must be 1-D and equal length")
    n = x.size
    if n < 3:
        raise InvalidInputError("pearson needs n >= 3")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.sum(xc * xc))
    syy = float(np.sum(yc * yc))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("pearson is undefined for zero-variance input")
    r = float(np.sum(xc * yc) / np.sqrt(sxx * syy))
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if 1.0 - r * r <= 0.0:
        return CorrelationResult(r=r, p_value=0.0, n=n)
    t = r * np.sqrt(df / (1.0 - r * r))
    return CorrelationResult(r=r, p_value=_student_t_two_sided_p(t, df), n=n)


def paired_ttest(a, b) -> TTestResult:
    """Paired-samples t-test on ``a - b`` with a two-sided p-value."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise InvalidInputError("a and b must be 1-D and equal length")
    n = a.size
    if n < 2:
        raise InvalidInputError("paired_ttest needs n >= 2")
    d = a - b
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("paired differences have zero variance")
    t = float(np.mean(d) / (sd / np.sqrt(n)))
    df = n - 1
    return TTestResult(t_statistic=t, df=df, p_value=_student_t_two_sided_p(t, df))


def _label_probs(label) -> np.ndarray:
    # accepts SoftLabel-like objects or raw probability vectors
    probs = getattr(label, "probs", label)
    return np.asarray(probs, dtype=np.float64)


def _match_fraction(predictions, labels) -> float:
    preds = [np.asarray(p, dtype=np.float64) for p in predictions]
    labs = [_label_probs(l) for l in labels]
    if len(preds) == 0:
        raise EmptyInputError("no samples to score")
    if len(preds) != len(labs):
        raise InvalidInputError("predictions and labels must align")
    hits = sum(
        1 for p, l in zip(preds, labs) if int(np.argmax(p)) == int(np.argmax(l))
    )
    return hits / len(preds)


def accuracy(predictions, labels) -> float:
    """Percentage of samples whose predicted argmax matches the label argmax.

    Argmax ties resolve to the lowest class index on both sides.
    """
    return _match_fraction(predictions, labels) * 100.0


def _round_half_away(value: float) -> int:
    return int(np.floor(value + 0.5)) if value >= 0 else -int(np.floor(-value + 0.5))


def rejection_curve(predictions, labels, uncertainties, coverages) -> RejectionCurve:
    """Accuracy over the lowest-uncertainty fraction of samples.

    For each coverage q the round(q·N) least-uncertain samples are kept
    (ties by sample index) and scored; accuracy is reported as a
    fraction in [0, 1].
    """
    preds = list(predictions)
    labs = list(labels)
    uncertainties = np.asarray(uncertainties, dtype=np.float64)
    n = len(preds)
    if n == 0:
        raise EmptyInputError("no samples to score")
    if len(labs) != n or uncertainties.shape != (n,):
        raise InvalidInputError("predictions, labels, and uncertainties must align")
    coverages = [float(c) for c in coverages]
    if not coverages:
        raise InvalidCoverageError("need at least one coverage value")
    if any(not 0.0 < c <= 1.0 for c in coverages):
        raise InvalidCoverageError("coverages must lie in (0, 1]")
    if any(b <= a for a, b in zip(coverages, coverages[1:])):
        raise InvalidCoverageError("coverages must be strictly increasing")
    order = np.argsort(uncertainties, kind="stable")
    points = []
    for q in coverages:
        n_keep = _round_half_away(q * n)
        if n_keep < 1:
            raise InvalidCoverageError(f"coverage {q} keeps no samples (N={n})")
        keep = order[:n_keep]
        frac = _match_fraction([preds[i] for i in keep], [labs[i] for i in keep])
        points.append(RejectionPoint(coverage=q, accuracy=frac, n_kept=n_keep))
    return RejectionCurve(points=tuple(points))


def rank_extremes(uncertainties, k: int, ids=None) -> tuple[list, list]:
    """Ids of the k least- and k most-uncertain samples.

    Sorting is stable ascending, so ties prefer lower sample indices;
    the high list is returned most-uncertain first. Without ``ids`` the
    indices themselves are returned.
    """
    uncertainties = np.asarray(uncertainties, dtype=np.float64)
    n = uncertainties.size
    if k > n or k < 0:
        raise InvalidInputError(f"k must lie in [0, {n}]")
    if ids is None:
        ids = list(range(n))
    else:
        ids = list(ids)
        if len(ids) != n:
            raise InvalidInputError("ids must align with uncertainties")
    order = np.argsort(uncertainties, kind="stable")
    lowest = [ids[i] for i in order[:k]]
    highest = [ids[i] for i in order[n - k :][::-1]]
    return lowest, highest
