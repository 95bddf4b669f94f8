#!/usr/bin/env python3
"""From raw crowd vote counts to soft labels and disagreement scores.

Shows the normalization rule (auxiliary columns dropped, the rest
renormalized), the disagreement probability d = 1 - sum(p^2), and the
density histogram used to summarize a whole dataset.

Run:  python3 demos/02_annotator_disagreement.py
"""

import numpy as np

from uncproxy.annotations import (
    AnnotationRecord,
    LabelSchema,
    disagreement_histogram,
    normalize_counts,
)

schema = LabelSchema(
    class_names=("neutral", "happy", "surprise", "sad"),
    excluded_columns=("unknown",),
)

rows = [
    ("unanimous", (10, 0, 0, 0, 0)),
    ("leaning", (7, 2, 1, 0, 0)),
    ("split", (5, 5, 0, 0, 0)),
    ("confused", (3, 3, 2, 2, 0)),
    ("with-junk-votes", (4, 3, 0, 1, 2)),  # two 'unknown' votes get dropped
]

print(f"{'sample':>16s}  {'soft label':36s} {'disagreement':>12s}")
for name, counts in rows:
    soft = normalize_counts(AnnotationRecord(name, counts), schema)
    vec = ", ".join(f"{p:.2f}" for p in soft.probs)
    print(f"{name:>16s}  [{vec}]  {soft.disagreement:12.3f}")

print(
    "\nd is the chance two annotators drawn from the histogram disagree:"
    "\n0 for unanimity, 1 - 1/C for a full split."
)

# --- dataset-level view ------------------------------------------------------
g = np.random.default_rng(1)
many = [
    normalize_counts(
        AnnotationRecord(f"s{i}", tuple(g.multinomial(10, g.dirichlet([2.0, 1.0, 0.7, 0.5]))) + (0,)),
        schema,
    ).disagreement
    for i in range(2000)
]
edges, densities = disagreement_histogram(many, bins=12)
area = float(np.sum(densities * np.diff(edges)))
print(f"\nhistogram over {len(many)} simulated samples (area = {area:.6f}):")
peak = densities.max()
for lo, hi, d in zip(edges, edges[1:], densities):
    bar = "#" * int(round(30 * d / peak)) if peak else ""
    print(f"  [{lo:4.2f}, {hi:4.2f})  {d:6.3f}  {bar}")
