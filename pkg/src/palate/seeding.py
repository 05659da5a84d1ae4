"""Deterministic seed derivation.

Every random draw in the pipeline flows from one master seed. Stages
derive their own sub-seeds by labeled hashing so adding or reordering a
stage never perturbs another stage's stream.
"""

import hashlib

import numpy as np

_SEED_BITS = 63


def text_seed(text: str) -> int:
    """Hash arbitrary text down to a usable seed."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (1 << _SEED_BITS)


def subseed(seed: int, label: str) -> int:
    """Derive a child seed from ``seed`` for the stage named ``label``."""
    return text_seed(f"{seed}:{label}")


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; the single RNG flavor used everywhere."""
    return np.random.Generator(np.random.PCG64(seed))
