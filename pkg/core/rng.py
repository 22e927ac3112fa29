# core/rng.py
import hashlib

import numpy as np


def _key_word(key: str | int) -> int:
    if isinstance(key, int):
        if key < 0:
            raise ValueError(f"stream keys must be non-negative, got {key}")
        return key
    return int.from_bytes(hashlib.sha256(key.encode("utf-8")).digest()[:4], "little")


def derive_rng(seed: int, *keys: str | int) -> np.random.Generator:
    """Independent generator for the stream named by ``keys`` under the run seed.

    The same (seed, keys) always yields the same stream, whatever order the
    streams are requested in, so concurrent work stays reproducible.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(_key_word(k) for k in keys))
    return np.random.default_rng(sequence)
