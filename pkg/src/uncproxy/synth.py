"""Synthetic soft-labeled classification data with known posteriors.

Features are drawn from an equal-prior mixture of isotropic Gaussians,
so the exact class posterior at any point is a softmax over squared
distances to the component means. Simulated annotators vote by sampling
that posterior, which makes every downstream statistic (disagreement,
calibration, correlation with uncertainty) checkable against closed
forms.

A configurable fraction of samples is shifted in feature space *after*
annotation: the annotators rated the original stimulus, but the model
only ever sees the shifted features. Those samples are ordinary in
annotation terms yet lie off the training distribution, giving a clean
distribution-shift subgroup.

Randomness is split per sample: sample ``i`` uses the
``(seed, SYNTH_SAMPLE, i)`` stream, so generation order (or
parallelism) cannot change the dataset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import InvalidInputError


@dataclass(frozen=True)
class SynthConfig:
    n_samples: int
    n_classes: int
    feature_dim: int
    component_means: np.ndarray  # (n_classes, feature_dim)
    component_scale: float
    annotators_k: int
    ood_fraction: float = 0.0
    ood_shift: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1 or self.n_classes < 2 or self.feature_dim < 1:
            raise InvalidInputError("need n_samples >= 1, n_classes >= 2, feature_dim >= 1")
        if self.annotators_k < 1:
            raise InvalidInputError("annotators_k must be >= 1")
        if self.component_scale <= 0.0:
            raise InvalidInputError("component_scale must be positive")
        if not 0.0 <= self.ood_fraction < 1.0:
            raise InvalidInputError("ood_fraction must lie in [0, 1)")
        means = np.asarray(self.component_means, dtype=np.float64)
        if means.shape != (self.n_classes, self.feature_dim):
            raise InvalidInputError(
                f"component_means must have shape ({self.n_classes}, {self.feature_dim})"
            )
        shift = self.ood_shift
        shift = np.zeros(self.feature_dim) if shift is None else np.asarray(shift, dtype=np.float64)
        if shift.shape != (self.feature_dim,):
            raise InvalidInputError("ood_shift must be a feature-dim vector")
        object.__setattr__(self, "component_means", means)
        object.__setattr__(self, "ood_shift", shift)


@dataclass(frozen=True)
class SynthDataset:
    features: np.ndarray           # (N, D), shifted where is_ood
    true_posteriors: np.ndarray    # (N, C), at the pre-shift location
    annotation_counts: np.ndarray  # (N, C) ints summing to annotators_k
    is_ood: np.ndarray             # (N,) bool
    sample_ids: tuple[str, ...]

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


def true_posterior(x, config: SynthConfig) -> np.ndarray:
    """Exact class posterior p(c|x) for the configured mixture.

    Equal priors and a shared isotropic scale reduce Bayes' rule to a
    stabilized softmax of -||x - mu_c||^2 / (2 scale^2).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (config.feature_dim,):
        raise InvalidInputError("x must be a feature-dim vector")
    diffs = config.component_means - x
    logits = -np.sum(diffs * diffs, axis=1) / (2.0 * config.component_scale**2)
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def generate(config: SynthConfig) -> SynthDataset:
    """Draw a full dataset: features, exact posteriors, annotator votes."""
    n, c, d = config.n_samples, config.n_classes, config.feature_dim

    n_ood = int(np.floor(config.ood_fraction * n + 0.5))
    is_ood = np.zeros(n, dtype=bool)
    if n_ood:
        perm = rng.stream(config.seed, rng.SYNTH_OOD).permutation(n)
        is_ood[perm[:n_ood]] = True

    features = np.empty((n, d))
    posteriors = np.empty((n, c))
    counts = np.empty((n, c), dtype=np.int64)
    for i in range(n):
        g = rng.stream(config.seed, rng.SYNTH_SAMPLE, i)
        cls = int(g.integers(c))
        x = config.component_means[cls] + config.component_scale * g.standard_normal(d)
        post = true_posterior(x, config)
        counts[i] = g.multinomial(config.annotators_k, post)
        posteriors[i] = post
        features[i] = x + config.ood_shift if is_ood[i] else x

    sample_ids = tuple(f"s{i:06d}" for i in range(n))
    return SynthDataset(
        features=features,
        true_posteriors=posteriors,
        annotation_counts=counts,
        is_ood=is_ood,
        sample_ids=sample_ids,
    )


def grid_means(n_classes: int, feature_dim: int, radius: float) -> np.ndarray:
    """Convenient well-spread component means: corners of a 2-D box at
    ``±radius`` (cycled for more classes), zero in remaining dimensions."""
    if feature_dim < 2:
        raise InvalidInputError("grid_means needs feature_dim >= 2")
    corners = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
    means = np.zeros((n_classes, feature_dim))
    for cls in range(n_classes):
        cx, cy = corners[cls % 4]
        ring = 1 + cls // 4  # push extra classes onto wider rings
        means[cls, 0] = cx * radius * ring
        means[cls, 1] = cy * radius * ring
    return means
