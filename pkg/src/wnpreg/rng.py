"""Deterministic, parallel-safe random number streams.

Every stochastic routine in this package draws from a `numpy` Generator
built by `stream`.  Streams are keyed by a master seed plus an arbitrary
list of labels (strings or integers), so a given (seed, labels) pair
always yields the same draws regardless of process/thread scheduling or
how many other streams were opened before it.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "label_hash"]

_MASK64 = (1 << 64) - 1


def label_hash(label: str) -> int:
    """Stable 64-bit hash of a string label (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stream(master_seed: int, *labels: int | str) -> np.random.Generator:
    """Return a Generator for the sub-stream identified by `labels`.

    Parameters
    ----------
    master_seed : int
        Top-level experiment seed.
    *labels : int or str
        Identifiers of the sub-stream (e.g. a cell label and a
        replication index).  Strings are hashed; integers used as-is.

    Returns
    -------
    numpy.random.Generator
        Counter-based (Philox) generator, cheap to create in bulk.
    """
    entropy = [int(master_seed) & _MASK64]
    for lab in labels:
        if isinstance(lab, str):
            entropy.append(label_hash(lab))
        else:
            entropy.append(int(lab) & _MASK64)
    seq = np.random.SeedSequence(entropy)
    return np.random.Generator(np.random.Philox(seq))
