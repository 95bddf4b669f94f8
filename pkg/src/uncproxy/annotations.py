"""Crowd annotation ingestion, soft labels, and disagreement.

A labels file carries one row of per-class vote counts per sample.
Auxiliary columns that are not classes (e.g. ``unknown`` or ``NF`` tags)
are dropped before normalization, and the remaining counts become a
probability vector (the soft label). The disagreement probability of a
sample is the chance that two independent draws from its soft label
differ: ``d = 1 - sum(p_c^2)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyInputError,
    InvalidInputError,
    LabelParseError,
    SchemaMismatchError,
    UnlabeledSampleError,
)

SIMPLEX_TOL = 1e-6


@dataclass(frozen=True)
class LabelSchema:
    """Ordered class columns plus columns to drop before normalization."""

    class_names: tuple[str, ...]
    excluded_columns: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "excluded_columns", tuple(self.excluded_columns))
        if not self.class_names:
            raise InvalidInputError("schema needs at least one class name")
        all_cols = self.class_names + self.excluded_columns
        if len(set(all_cols)) != len(all_cols):
            raise InvalidInputError("schema column names must be unique")

    @property
    def columns(self) -> tuple[str, ...]:
        """All count columns in file order: classes first, then excluded."""
        return self.class_names + self.excluded_columns

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class AnnotationRecord:
    """Raw per-sample vote counts, aligned with ``schema.columns``."""

    sample_id: str
    counts: tuple[int, ...]

    def class_counts(self, schema: LabelSchema) -> np.ndarray:
        """Counts over the class columns only (excluded columns dropped)."""
        if len(self.counts) != len(schema.columns):
            raise InvalidInputError(
                f"record {self.sample_id!r} has {len(self.counts)} counts, "
                f"schema expects {len(schema.columns)}"
            )
        return np.asarray(self.counts[: schema.n_classes], dtype=np.int64)


@dataclass(frozen=True)
class SoftLabel:
    """Normalized annotation histogram plus its disagreement probability."""

    sample_id: str
    probs: np.ndarray
    disagreement: float


def disagreement(probs) -> float:
    """Probability that two draws from the histogram disagree: 1 - sum(p^2)."""
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise InvalidInputError("probs must be a non-empty 1-D vector")
    if not np.all(np.isfinite(probs)) or np.any(probs < -1e-9):
        raise InvalidInputError("probs must be finite and non-negative")
    if abs(float(probs.sum()) - 1.0) > SIMPLEX_TOL:
        raise InvalidInputError(f"probs sums to {probs.sum()}, expected 1")
    return float(1.0 - np.sum(probs * probs))


def normalize_counts(record: AnnotationRecord, schema: LabelSchema) -> SoftLabel:
    """Drop excluded columns, normalize the rest, and attach disagreement."""
    counts = record.class_counts(schema)
    if np.any(counts < 0):
        raise InvalidInputError(f"record {record.sample_id!r} has negative counts")
    total = int(counts.sum())
    if total < 1:
        raise UnlabeledSampleError(
            f"record {record.sample_id!r} has no votes left after exclusion"
        )
    probs = counts.astype(np.float64) / total
    return SoftLabel(sample_id=record.sample_id, probs=probs, disagreement=disagreement(probs))


def load_labels(path, schema: LabelSchema) -> list[AnnotationRecord]:
    """Read a labels CSV into records, preserving row order.

    Header must be ``id,<class...>[,<excluded...>]`` or the bare column
    list; without an ``id`` column the row index becomes the sample id.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        expected = list(schema.columns)
        if header == ["id"] + expected:
            has_id = True
        elif header == expected:
            has_id = False
        else:
            raise SchemaMismatchError(
                f"{path}: header {header} does not match schema columns "
                f"['id'] + {expected} (or the bare column list)"
            )

        records: list[AnnotationRecord] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            expected_len = len(expected) + (1 if has_id else 0)
            if len(row) != expected_len:
                raise LabelParseError(
                    f"expected {expected_len} cells, found {len(row)}", line_no
                )
            if has_id:
                sample_id, cells = row[0], row[1:]
            else:
                sample_id, cells = str(len(records)), row
            counts = []
            for col, cell in zip(expected, cells):
                try:
                    value = int(cell)
                except ValueError:
                    raise LabelParseError(
                        f"column {col!r}: {cell!r} is not an integer", line_no
                    ) from None
                if value < 0:
                    raise InvalidInputError(
                        f"line {line_no}: column {col!r} has negative count {value}"
                    )
                counts.append(value)
            records.append(AnnotationRecord(sample_id=sample_id, counts=tuple(counts)))
    return records


def disagreement_histogram(values, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Density histogram of disagreement values over the fixed [0, 1] domain.

    Returns ``(bin_edges, densities)`` with ``sum(density * width) == 1``.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("no disagreement values to bin")
    if bins < 1:
        raise InvalidInputError("bins must be >= 1")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise InvalidInputError("disagreement values must lie in [0, 1]")
    densities, edges = np.histogram(values, bins=bins, range=(0.0, 1.0), density=True)
    return edges, densities
