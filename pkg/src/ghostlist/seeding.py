import hashlib

import numpy as np
from numpy.random import Generator, SeedSequence


def spawn_generators(seed: int, n: int) -> list[Generator]:
    """Independent generators, one per concern, from a single root seed."""
    return [np.random.default_rng(stream) for stream in SeedSequence(seed).spawn(n)]


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from any mix of ints and strings."""
    hasher = hashlib.sha256()
    hasher.update("|".join(str(part) for part in parts).encode("utf-8"))
    return int.from_bytes(hasher.digest()[:8], "big")


def derive_generator(*parts: object) -> Generator:
    return np.random.default_rng(derive_seed(*parts))
