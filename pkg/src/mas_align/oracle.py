"""Brute-force ground truth over every monotonic alignment of a small instance."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import MasError

MAX_PATHS = 1_000_000


class TooLarge(MasError, ValueError):
    pass


def count_paths(t: int, s: int) -> int:
    return math.comb(s - 1, t - 1)


def enumerate_paths(t: int, s: int):
    """Yield all C(s-1, t-1) paths (0-based), lexicographic over step columns.

    A path is fixed by choosing which t-1 of the s-1 column transitions move
    to the next text index.
    """
    if not 1 <= t <= s:
        raise ValueError(f"need 1 <= t <= s, got t={t}, s={s}")
    n = count_paths(t, s)
    if n > MAX_PATHS:
        raise TooLarge(f"C({s - 1}, {t - 1}) = {n} paths exceeds guard {MAX_PATHS}")
    for steps in itertools.combinations(range(1, s), t - 1):
        inc = np.zeros(s, dtype=np.int64)
        inc[list(steps)] = 1
        yield np.cumsum(inc)


def path_score(q: np.ndarray, path: np.ndarray) -> float:
    return math.fsum(float(q[i, j]) for j, i in enumerate(path))


def best_paths(q: np.ndarray, t: int, s: int, atol: float = 1e-9) -> tuple[float, list[np.ndarray]]:
    """Maximum float64 score and every path within ``atol`` of it."""
    q = np.asarray(q, dtype=np.float64)[:t, :s]
    paths = list(enumerate_paths(t, s))
    scores = np.array([path_score(q, p) for p in paths])
    best = float(scores.max())
    return best, [p for p, sc in zip(paths, scores) if sc >= best - atol]
