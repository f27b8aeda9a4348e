"""Deterministic random-stream derivation.

Every randomized routine in this package takes a ``numpy.random.Generator``.
Experiment-level code derives those generators from a master seed plus a list
of labelling components (dataset name, attack name, repetition index, ...) so
that any single result can be recomputed in isolation.

Strings are folded into 64-bit integers with sha256 before being handed to
``numpy.random.SeedSequence``; floats are hashed through their ``repr`` so the
derivation does not depend on binary float formatting.
"""

import hashlib

import numpy as np

__all__ = ["seed_components", "derive_rng", "derive_seed"]

_MASK64 = (1 << 64) - 1


def _component(part) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK64
    if isinstance(part, float):
        part = repr(part)
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")
    raise TypeError(f"cannot derive a seed from {type(part).__name__!r}")


def seed_components(*parts) -> tuple:
    """Map arbitrary labelling parts to a tuple of 64-bit entropy words."""
    return tuple(_component(p) for p in parts)


def derive_rng(*parts) -> np.random.Generator:
    """Deterministic Generator for the given labelling parts."""
    return np.random.default_rng(np.random.SeedSequence(list(seed_components(*parts))))


def derive_seed(*parts) -> int:
    """Collapse labelling parts to a single reproducible 63-bit integer."""
    ss = np.random.SeedSequence(list(seed_components(*parts)))
    return int(ss.generate_state(1, np.uint64)[0] >> 1)
