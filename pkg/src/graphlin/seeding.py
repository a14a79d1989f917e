"""Stable per-example random generators, independent of process hash seeds."""

from __future__ import annotations

import hashlib
import random

DEFAULT_SEED = 42


def derive_seed(seed: int, *parts: object) -> int:
    """Collapse (seed, parts...) into a stable 64-bit integer."""
    key = ":".join([str(seed), *(str(p) for p in parts)]).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def derive_rng(seed: int, *parts: object) -> random.Random:
    """A generator keyed on (seed, parts...); worker order cannot affect it."""
    return random.Random(derive_seed(seed, *parts))
