"""Entropy-based decomposition of Monte Carlo predictions.

Given the ``T`` stochastic class-probability rows produced by MC-dropout
inference, total uncertainty is the entropy of the averaged prediction,
aleatoric uncertainty is the average of the per-row entropies, and
epistemic uncertainty is their difference (the mutual information
between the prediction and the sampled dropout masks). All values are
in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Row sums may drift from 1 by float error; anything worse than this is
# treated as corrupt input rather than renormalized away.
SIMPLEX_TOL = 1e-6
NEGATIVE_TOL = -1e-9


def _as_simplex(p) -> np.ndarray:
    """Validate and renormalize a probability vector.

    Accepts entries down to -1e-9 (clipped to 0) and row sums within
    1e-6 of 1; anything further off raises ``InvalidInputError``.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise InvalidInputError("probability vector must be 1-D and non-empty")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("probability vector contains non-finite entries")
    if np.any(p < NEGATIVE_TOL):
        raise InvalidInputError(f"probability vector has negative entries: min={p.min()}")
    total = float(p.sum())
    if abs(total - 1.0) > SIMPLEX_TOL:
        raise InvalidInputError(f"probability vector sums to {total}, expected 1")
    p = np.clip(p, 0.0, None)
    return p / p.sum()


@dataclass(frozen=True)
class McPrediction:
    """T stochastic probability rows for one sample plus their mean."""

    sample_id: str
    probs: np.ndarray       # (T, C), each row on the simplex
    mean_probs: np.ndarray  # (C,), column mean of probs

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        mean_probs = np.asarray(self.mean_probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] < 1 or probs.shape[1] < 1:
            raise InvalidInputError("probs must be a non-empty (T, C) matrix")
        if mean_probs.shape != (probs.shape[1],):
            raise InvalidInputError("mean_probs length must equal the class count")
        if not np.all(np.isfinite(probs)):
            raise InvalidInputError("probs contains non-finite entries")
        if np.any(probs < NEGATIVE_TOL):
            raise InvalidInputError("probs contains negative entries")
        row_sums = probs.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > 1e-9):
            raise InvalidInputError("every probs row must sum to 1 within 1e-9")
        if np.any(np.abs(mean_probs - probs.mean(axis=0)) > 1e-9):
            raise InvalidInputError("mean_probs must be the column mean of probs")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "mean_probs", mean_probs)

    @classmethod
    def from_probs(cls, sample_id: str, probs) -> "McPrediction":
        probs = np.asarray(probs, dtype=np.float64)
        return cls(sample_id=sample_id, probs=probs, mean_probs=probs.mean(axis=0))

    @property
    def n_passes(self) -> int:
        return self.probs.shape[0]

    @property
    def n_classes(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True)
class UncertaintyTriple:
    """Total / aleatoric / epistemic uncertainty for one sample, in nats.

    ``u_total == u_aleatoric + u_epistemic`` holds exactly as stored.
    """

    u_total: float
    u_aleatoric: float
    u_epistemic: float


def entropy(p) -> float:
    """Shannon entropy of a probability vector in nats, with 0·log 0 = 0."""
    p = _as_simplex(p)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def total_uncertainty(mc: McPrediction) -> float:
    """Entropy of the MC-averaged predictive distribution."""
    return entropy(mc.mean_probs)


def aleatoric_uncertainty(mc: McPrediction) -> float:
    """Average entropy of the individual stochastic predictions."""
    return float(np.mean([entropy(row) for row in mc.probs]))


def decompose(mc: McPrediction) -> UncertaintyTriple:
    """Split an MC prediction into (total, aleatoric, epistemic) nats.

    The stored total is recomposed as ``aleatoric + epistemic`` so the
    additivity identity holds bitwise. A single stochastic pass carries
    no disagreement, so T=1 yields epistemic exactly 0.
    """
    aleatoric = aleatoric_uncertainty(mc)
    if mc.n_passes == 1:
        epistemic = 0.0
    else:
        epistemic = total_uncertainty(mc) - aleatoric
    return UncertaintyTriple(
        u_total=aleatoric + epistemic,
        u_aleatoric=aleatoric,
        u_epistemic=epistemic,
    )
