"""Deterministic, labelled random substreams.

Every Monte Carlo consumer derives its own counter-based generator from a
64-bit seed plus a tuple of labels, so that e.g. the (component, table-cell)
streams are mutually independent and reproducible across platforms and
across parallel execution orders.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_key(seed: int, *labels) -> int:
    """Stable 64-bit hash of (seed, labels)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed & _MASK64).to_bytes(8, "little"))
    for label in labels:
        h.update(repr(label).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def substream(seed: int, *labels) -> np.random.Generator:
    """Independent Philox generator keyed by (seed, labels)."""
    key = np.array([seed & _MASK64, stream_key(seed, *labels)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def derive_seed(seed: int, *labels) -> int:
    """Derive a child 64-bit seed, for APIs that take plain integer seeds."""
    return stream_key(seed, "derived", *labels)
