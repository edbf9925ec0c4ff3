"""Seeded randomness.

All random tensors come from numpy's counter-based Philox generator keyed by
a non-negative integer seed, so a (seed, shape) pair names one buffer on every
platform. Composite seeds (model seed + block index + parameter name, prompt
tokens, ...) are folded into a single 64-bit key with BLAKE2b.
"""
import hashlib
from typing import Sequence, Union

import numpy as np

from scenegen.errors import DimensionError

SeedPart = Union[int, str]


def derive_seed(*parts: SeedPart) -> int:
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(repr(part).encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "little")


def generator(seed: int) -> np.random.Generator:
    if seed < 0:
        seed = derive_seed(seed)
    return np.random.Generator(np.random.Philox(seed))


def seeded_normal(shape: Sequence[int], seed: int) -> np.ndarray:
    """Standard-normal samples of `shape`, reproducible from `seed`."""
    shape = tuple(int(s) for s in shape)
    if len(shape) == 0 or any(s <= 0 for s in shape):
        raise DimensionError(f"seeded_normal needs positive extents, got {shape}")
    return generator(seed).standard_normal(shape)
