import math

import numpy as np
import pytest

from conftest import one_based
from mas_align.core import check_path
from mas_align.oracle import TooLarge, best_paths, enumerate_paths


def test_two_by_three():
    # step at column 2 sorts before step at column 3
    assert [one_based(p) for p in enumerate_paths(2, 3)] == [[1, 2, 2], [1, 1, 2]]


def test_single_row():
    assert [one_based(p) for p in enumerate_paths(1, 4)] == [[1, 1, 1, 1]]


@pytest.mark.parametrize("t, s", [(3, 5), (1, 1), (4, 4), (5, 10), (6, 10)])
def test_counts_distinct_and_valid(t, s):
    paths = [tuple(p) for p in enumerate_paths(t, s)]
    assert len(paths) == len(set(paths)) == math.comb(s - 1, t - 1)
    for p in paths:
        check_path(p, t, s)


def test_lexicographic_order():
    paths = [tuple(p) for p in enumerate_paths(3, 6)]
    # earlier steps (a smaller step column) come first, i.e. decreasing path order
    assert paths == sorted(paths, reverse=True)


def test_guard():
    with pytest.raises(TooLarge):
        next(enumerate_paths(20, 60))


def test_best_worked_example():
    q = np.array([[1, 2, 3], [4, 5, 6]], dtype=np.float32)
    best, optima = best_paths(q, 2, 3)
    assert best == 12.0
    assert [one_based(p) for p in optima] == [[1, 2, 2]]


def test_best_degenerate_zeros():
    best, optima = best_paths(np.zeros((3, 5)), 3, 5)
    assert best == 0.0
    assert len(optima) == 6


def test_best_square_unique():
    best, optima = best_paths(np.zeros((2, 2)), 2, 2)
    assert best == 0.0
    assert [one_based(p) for p in optima] == [[1, 2]]
