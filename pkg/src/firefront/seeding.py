"""Deterministic sub-seed derivation.

Every random choice in the pipeline flows from one master seed through named
sub-seeds (fire index, augmentation index, measurement index, ...) so any
tuple or artifact can be regenerated in isolation.
"""

from __future__ import annotations

import hashlib

import numpy as np


def subseed(master: int, *path) -> int:
    """Stable 63-bit seed derived from ``master`` and a label path."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master)).encode())
    for part in path:
        h.update(b"/")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(), "little") >> 1


def rng_for(master: int, *path) -> np.random.Generator:
    return np.random.default_rng(subseed(master, *path))
