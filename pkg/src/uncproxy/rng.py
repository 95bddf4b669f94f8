"""Deterministic random streams.

Every random draw in this package comes from a counter-based
Philox-4x64-10 stream, so any quantity is a pure function of
``(seed, purpose, indices)`` and is reproducible across platforms and
schedulers. The stream layout is part of the package contract:

* key word 0   = user seed (64-bit unsigned)
* key word 1   = purpose code (constants below)
* counter      = ``[0, i, j, k]`` where ``i``/``j``/``k`` are the
  sub-stream indices a caller provides (layer index, pass index,
  sample index, ...). Counter word 0 is left free for the generator's
  own block counter, so sub-streams never overlap for fewer than
  2^64 blocks of output.

Anything that needs "the same randomness" must therefore agree on the
seed, the purpose code, and the index tuple; nothing depends on call
order or thread scheduling.
"""

from __future__ import annotations

import numpy as np

# Purpose codes. These are stable identifiers: changing one silently
# changes every downstream artifact, so treat them like a file format.
WEIGHT_INIT = 1
BATCH_SHUFFLE = 2
TRAIN_MASKS = 3
PREDICT_MASKS = 4
SYNTH_SAMPLE = 5
SYNTH_OOD = 6


def stream(seed: int, purpose: int, i: int = 0, j: int = 0, k: int = 0) -> np.random.Generator:
    """Return the generator for the ``(seed, purpose, i, j, k)`` sub-stream.

    Repeated calls with the same arguments yield generators that produce
    identical sequences.
    """
    if seed < 0 or seed > np.iinfo(np.uint64).max:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    key = np.array([seed, purpose], dtype=np.uint64)
    counter = np.array([0, i, j, k], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))
