"""Seeded random streams.

Every random draw in the package comes from a Philox generator keyed by
``(master seed, purpose tag, *indices)``. Streams for different purposes or
trial indices never overlap, so parallel trials give the same numbers no
matter which worker runs them or in which order.
"""

from __future__ import annotations

import hashlib

import numpy as np

from seqham.constants import RNG_SCHEME
from seqham.shared.validators import ValidationError

SCHEME = RNG_SCHEME


def _tag_key(tag: str) -> int:
    # Python's str hash is salted per process; blake2b is stable.
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _seed_sequence(seed: int, tag: str, indices: tuple[int, ...]) -> np.random.SeedSequence:
    if int(seed) < 0:
        raise ValidationError(f"Seed must be non-negative, got: {seed}")
    spawn_key = (_tag_key(tag), *(int(i) for i in indices))
    return np.random.SeedSequence(int(seed), spawn_key=spawn_key)


def derive_rng(seed: int, tag: str, *indices: int) -> np.random.Generator:
    """Return the generator for ``seed`` specialised to a purpose tag and indices."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, tag, indices)))


def derive_seed(seed: int, tag: str, *indices: int) -> int:
    """Return a 63-bit child seed, for APIs that take a plain integer seed."""
    state = _seed_sequence(seed, tag, indices).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])
