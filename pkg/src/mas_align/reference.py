"""Sequential MAS baseline: explicit Q cache, nested loops, backward argmax.

Deliberately kept in the shape of the original Cython code so it can serve
as the trusted reference and the slow end of the benchmarks.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .core import AlignmentMatrix, LikelihoodBatch, MasConfig


LINE_FLOATS = 16


def row_pitch(s: int) -> int:
    """Row length in floats: whole cache lines, an odd number of them.

    The inner loop walks down a column, so with a power-of-two row stride
    every access lands in the same few cache sets.
    """
    lines = -(-s // LINE_FLOATS)
    return LINE_FLOATS * (lines | 1)


@njit(cache=True, nogil=True)
def _forward_kernel(q, Q, t, s):
    Q[0, 0] = q[0, 0]
    for j in range(1, s):
        Q[0, j] = Q[0, j - 1] + q[0, j]
    for j in range(1, s):
        for i in range(1, min(j + 1, t)):
            Q[i, j] = max(Q[i - 1, j - 1], Q[i, j - 1]) + q[i, j]


@njit(cache=True, nogil=True)
def _backward_kernel(Q, t, s, path):
    idx = t - 1
    path[s - 1] = idx
    for j in range(s - 2, -1, -1):
        # ties keep the current index
        if idx > 0 and Q[idx - 1, j] > Q[idx, j]:
            idx -= 1
        path[j] = idx


def forward_reference(q: np.ndarray, t: int, s: int, cfg: MasConfig | None = None) -> np.ndarray:
    """Fill the ``[t, s]`` cache of best prefix-path scores.

    ``Q[i, j]`` is the best score of a monotonic path from ``(0, 0)`` to
    ``(i, j)``. Cells with ``i > j`` cannot be reached and keep the sentinel.
    """
    cfg = cfg or MasConfig()
    # numpy-side allocation so large buffers get huge-page backing
    pitch = row_pitch(s)
    padded = np.empty((t, pitch), dtype=np.float32)
    padded[:, :s] = q[:t, :s]
    Q = np.full((t, pitch), cfg.sentinel, dtype=np.float32)
    _forward_kernel(padded, Q, t, s)
    return Q[:, :s]


def backward_reference(Q: np.ndarray, t: int, s: int) -> np.ndarray:
    path = np.empty(s, dtype=np.int64)
    _backward_kernel(Q, t, s, path)
    return path


def align_reference(batch: LikelihoodBatch, cfg: MasConfig | None = None) -> AlignmentMatrix:
    cfg = cfg or MasConfig()
    out = np.zeros(batch.shape, dtype=np.uint8)
    for b, (t, s) in enumerate(batch.valid_lengths):
        Q = forward_reference(batch.values[b], t, s, cfg)
        path = backward_reference(Q, t, s)
        out[b, path, np.arange(s)] = 1
    return AlignmentMatrix._adopt(out, batch.valid_lengths)
