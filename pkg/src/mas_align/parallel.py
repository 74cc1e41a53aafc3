"""Parallelized MAS: the text loop becomes one lane-wide update per column.

Each item is copied once into an S-major buffer so that column ``j`` is a
contiguous run of lanes. The forward pass then overwrites that buffer in
place; column ``j`` only ever reads column ``j - 1`` and its own likelihoods.
Batch items are independent and are dealt round-robin to a thread pool
(kernels release the GIL); output slices are disjoint.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .core import AlignmentMatrix, LanePadding, LikelihoodBatch, MasConfig


def pad_lanes(t: int, policy: LanePadding = LanePadding.NONE) -> int:
    """Lane count for a text length; padding to a power of two mirrors fixed block sizes."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if LanePadding(policy) is LanePadding.NEXT_POWER_OF_TWO:
        return 1 << (t - 1).bit_length()
    return t


BLOCK = 16


@njit(cache=True, nogil=True)
def _forward_columns(buf, lanes, j_start, j_stop, sentinel):
    # buf[j, i] holds q[i, j]; lane 0 of the shifted operand is the virtual row q_0.
    if j_start == 0:
        first = buf[0]
        for i in range(1, lanes):
            first[i] = sentinel
        j_start = 1
    for j in range(j_start, j_stop):
        prev = buf[j - 1]
        cur = buf[j]
        cur[0] = max(sentinel, prev[0]) + cur[0]
        for i in range(1, lanes):
            cur[i] = max(prev[i - 1], prev[i]) + cur[i]


@njit(cache=True, nogil=True)
def _load_columns(values, t, lanes, j_start, j_stop, sentinel, buf):
    for i in range(t):
        for j in range(j_start, j_stop):
            buf[j, i] = values[i, j]
    for j in range(j_start, j_stop):
        row = buf[j]
        for i in range(t, lanes):
            row[i] = sentinel


@njit(cache=True, nogil=True)
def _backward_columns(buf, t, s, path):
    idx = t - 1
    path[s - 1] = idx
    for j in range(s - 2, -1, -1):
        if idx > 0 and buf[j, idx - 1] > buf[j, idx]:
            idx -= 1
        path[j] = idx


@njit(cache=True, nogil=True)
def _align_item(values, t, s, lanes, sentinel, buf, out_item):
    # transpose a block of columns, then advance the recurrence while it is still in cache
    for j0 in range(0, s, BLOCK):
        j1 = min(j0 + BLOCK, s)
        _load_columns(values, t, lanes, j0, j1, sentinel, buf)
        _forward_columns(buf, lanes, j0, j1, sentinel)
    path = np.empty(s, dtype=np.int64)
    _backward_columns(buf, t, s, path)
    for j in range(s):
        out_item[path[j], j] = 1


def forward_parallel(q: np.ndarray, t: int, s: int, cfg: MasConfig | None = None) -> None:
    """Overwrite ``q[:t, :s]`` (indexed ``[text, speech]``) with cumulative scores.

    Works on the caller's memory through a transposed view, so a text-major
    array is updated with strided lane access. ``align_parallel`` avoids that
    by handing the kernel a contiguous S-major copy.
    """
    cfg = cfg or MasConfig()
    if q.dtype != np.float32:
        raise TypeError(f"q must be float32, got {q.dtype}")
    _forward_columns(q[:t, :s].T, t, 0, s, cfg.sentinel)


def backward_parallel(q_scores: np.ndarray, t: int, s: int) -> np.ndarray:
    path = np.empty(s, dtype=np.int64)
    _backward_columns(q_scores[:t, :s].T, t, s, path)
    return path


def default_threads() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def align_parallel(batch: LikelihoodBatch, cfg: MasConfig | None = None) -> AlignmentMatrix:
    cfg = cfg or MasConfig()
    out = np.zeros(batch.shape, dtype=np.uint8)
    sentinel = cfg.sentinel
    dims = [(int(t), int(s), pad_lanes(int(t), cfg.lane_padding)) for t, s in batch.valid_lengths]
    workers = min(cfg.threads or default_threads(), batch.batch_size)

    def work(first: int) -> None:
        # one scratch buffer per worker, reused for each of its items
        items = range(first, batch.batch_size, workers)
        scratch = np.empty(max(s * lanes for t, s, lanes in (dims[b] for b in items)), dtype=np.float32)
        for b in items:
            t, s, lanes = dims[b]
            buf = scratch[: s * lanes].reshape(s, lanes)
            _align_item(batch.values[b], t, s, lanes, sentinel, buf, out[b])

    if workers <= 1:
        work(0)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(workers)))
    return AlignmentMatrix._adopt(out, batch.valid_lengths)
