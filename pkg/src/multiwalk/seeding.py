"""Seed derivation.

Every random stream is keyed by a root seed plus an integer path, e.g.
``(root, generator, node, index)``, using numpy's ``SeedSequence`` spawn
keys. A stream depends only on its key, never on how many other streams
were drawn before it, so pools and corpora come out identical whatever
order or thread the work runs in.

String components (generator tags, method names) are folded to integers
with CRC-32, which is stable across processes and Python versions
(unlike ``hash``).
"""
from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    part = int(part)
    if part < 0:
        raise ValueError(f"seed path components must be non-negative, got {part}")
    return part


def seed_sequence(root: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(root), spawn_key=tuple(_key(p) for p in path))


def rng_for(root: int, *path) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(root, *path)))


def derive_seed(root: int, *path) -> int:
    """A 63-bit integer seed for a child stage (fits in int64 / numba seeds)."""
    return int(seed_sequence(root, *path).generate_state(1, np.uint64)[0] >> np.uint64(1))
