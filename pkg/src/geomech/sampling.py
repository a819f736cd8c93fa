"""Deterministic quasi-random sampling of chart points and states.

Checks in this package evaluate residuals at batches of points.  Those
batches come from a Halton sequence with a seed-derived Cranley-Patterson
rotation: low-discrepancy (good coverage of a box at small counts),
reproducible bit-for-bit for a given seed across platforms and library
versions, and still seedable so independent trials decorrelate.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from geomech.geometry import State

__all__ = ["halton", "sample_box", "sample_states"]

_PRIMES = (
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
    53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113,
)


def _radical_inverse(index: int, base: int) -> float:
    inv = 0.0
    scale = 1.0 / base
    while index > 0:
        index, digit = divmod(index, base)
        inv += digit * scale
        scale /= base
    return inv


def halton(count: int, dim: int, seed: int = 0) -> np.ndarray:
    """`count` points of the `dim`-dimensional Halton sequence in [0, 1),
    rotated by a seed-derived offset (mod 1).  seed=0 still rotates; the
    raw sequence's first point (all zeros) is never emitted."""
    if dim > len(_PRIMES):
        raise ValueError(f"at most {len(_PRIMES)} sampling dimensions supported")
    shift = np.random.default_rng(seed).uniform(0.0, 1.0, size=dim)
    pts = np.empty((count, dim))
    for k in range(count):
        for d in range(dim):
            pts[k, d] = _radical_inverse(k + 1, _PRIMES[d])
    return (pts + shift) % 1.0


def sample_box(box: Sequence[Sequence[float]], count: int, seed: int = 0) -> np.ndarray:
    """`count` points spread over the axis-aligned box given as a sequence
    of (low, high) pairs.  Deterministic for a given seed."""
    lows = np.array([b[0] for b in box], dtype=float)
    highs = np.array([b[1] for b in box], dtype=float)
    if np.any(highs <= lows):
        raise ValueError("box bounds must satisfy low < high in every axis")
    unit = halton(count, len(box), seed)
    return lows + unit * (highs - lows)


def sample_states(
    xbox: Sequence[Sequence[float]],
    count: int,
    seed: int = 0,
    vbox: Sequence[Sequence[float]] | None = None,
) -> list:
    """`count` states with positions in `xbox` and velocities in `vbox`
    (default: [-1, 1] per axis).  Positions and velocities are drawn
    jointly from one Halton stream of dimension 2n."""
    n = len(xbox)
    if vbox is None:
        vbox = [(-1.0, 1.0)] * n
    if len(vbox) != n:
        raise ValueError("velocity box must match position box dimension")
    joint = sample_box(list(xbox) + list(vbox), count, seed)
    return [State(row[:n], row[n:]) for row in joint]
