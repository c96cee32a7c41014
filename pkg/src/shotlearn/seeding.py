"""Deterministic seed derivation for experiment cells.

Every replica of every experiment cell gets its own random stream derived
from the master seed and the cell's identity (grid values, replica index),
never from execution order.  Serial and parallel runs therefore produce
bit-identical results.
"""

from __future__ import annotations

import numpy as np

# Sub-stream tags appended to a cell key to split it into independent
# streams (training draw, validation draw, ...).
STREAM_TRAIN = 0
STREAM_VALIDATION = 1
STREAM_TEST = 2


def cell_seed(master: int, *key: int) -> int:
    """Derive a 64-bit seed for one experiment cell.

    The rule is ``SeedSequence([master, *key])`` followed by packing the
    first two 32-bit state words into one integer.  Identical
    ``(master, key)`` pairs always map to the same seed, on any platform,
    in any call order.  All key components must be non-negative integers.
    """
    entropy = [int(master)] + [int(k) for k in key]
    if any(k < 0 for k in entropy):
        raise ValueError("seed key components must be non-negative")
    words = np.random.SeedSequence(entropy).generate_state(2)
    return (int(words[0]) << 32) | int(words[1])


def cell_rng(master: int, *key: int) -> np.random.Generator:
    """Generator seeded with :func:`cell_seed` of the same arguments."""
    return np.random.default_rng(cell_seed(master, *key))
