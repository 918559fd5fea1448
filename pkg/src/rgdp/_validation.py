"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


def check_random_state(seed) -> np.random.Generator:
    """Turn ``seed`` into a :class:`numpy.random.Generator`.

    ``None`` gives a fresh unseeded generator, an int or
    :class:`numpy.random.SeedSequence` seeds a new PCG64 stream and an
    existing Generator is passed through unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise ValueError(f"{seed!r} cannot be used to seed a numpy.random.Generator")


def derive_seed(seed, *keys: int) -> np.random.SeedSequence:
    """Child seed for (``seed``, ``*keys``); stable across runs and platforms."""
    if seed is None:
        return np.random.SeedSequence()
    return np.random.SeedSequence([int(seed)] + [int(k) for k in keys])


def check_positive(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_count(name: str, value, minimum: int = 1) -> int:
    if int(value) != value or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value}")
    return int(value)
