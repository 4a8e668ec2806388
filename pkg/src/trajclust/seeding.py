"""Deterministic named-stream RNG derivation.

Every source of randomness in the package draws from a single 64-bit root
seed.  Independent components get independent streams by deriving a
sub-seed from (root seed, stream name); the name is hashed with BLAKE2b so
derivation is stable across processes and platforms (unlike ``hash()``).
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed_sequence(seed: int, *labels: object) -> np.random.SeedSequence:
    """Derive a SeedSequence for the stream named by ``labels``."""
    h = hashlib.blake2b(digest_size=8)
    for label in labels:
        h.update(str(label).encode("utf-8"))
        h.update(b"\x1f")
    return np.random.SeedSequence(entropy=(seed & _MASK64, int.from_bytes(h.digest(), "little")))


def stream_rng(seed: int, *labels: object) -> np.random.Generator:
    """Generator for the named stream, e.g. ``stream_rng(seed, "tsne")``.

    Identical (seed, labels) always produce an identical stream; distinct
    labels produce statistically independent streams.
    """
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *labels)))


def derive_seed(seed: int, *labels: object) -> int:
    """64-bit integer sub-seed for the named stream."""
    return int(derive_seed_sequence(seed, *labels).generate_state(1, np.uint64)[0])
