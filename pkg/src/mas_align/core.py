"""Domain types shared by every engine.

Indices are 1-based in prose and 0-based in storage: a path stored as
``[0, 1, 1]`` is the alignment written ``[1, 2, 2]`` in the docs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_NEG_VAL = -1e32
# Worst case the forward pass folds S sentinel-seeded terms together; S * 1e32
# must stay below float32 max (~3.4e38).
S_MAX = 100_000


class MasError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MasError, ValueError):
    def __init__(self, message: str, item: int | None = None):
        self.item = item
        if item is not None:
            message = f"item {item}: {message}"
        super().__init__(message)


class InfeasibleLengths(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class ZeroDim(ValidationError):
    pass


class LengthOutOfRange(ValidationError):
    """Valid length exceeds the padded capacity or the S_MAX limit."""


class InvalidPath(MasError, ValueError):
    pass


class InvalidMatrix(MasError, ValueError):
    pass


class Engine(str, enum.Enum):
    REFERENCE = "reference"
    PARALLEL = "parallel"


class LanePadding(str, enum.Enum):
    NONE = "none"
    NEXT_POWER_OF_TWO = "next_power_of_two"


@dataclass(frozen=True)
class MasConfig:
    engine: Engine = Engine.PARALLEL
    max_neg_val: float = DEFAULT_MAX_NEG_VAL
    lane_padding: LanePadding = LanePadding.NONE
    threads: int | None = None
    # Only for demonstrating what a too-small sentinel does; never set in real use.
    allow_weak_sentinel: bool = False

    def __post_init__(self):
        object.__setattr__(self, "engine", Engine(self.engine))
        object.__setattr__(self, "lane_padding", LanePadding(self.lane_padding))
        with np.errstate(over="ignore"):
            v = np.float32(self.max_neg_val)
        if not np.isfinite(v) or v >= 0:
            raise ValueError(f"max_neg_val must be finite and negative in float32, got {self.max_neg_val}")
        if not self.allow_weak_sentinel and v > np.float32(-1e30):
            raise ValueError(f"max_neg_val must be <= -1e30, got {self.max_neg_val}")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def sentinel(self) -> np.float32:
        return np.float32(self.max_neg_val)


def _as_lengths(valid_lengths, batch_size: int, t_cap: int, s_cap: int) -> np.ndarray:
    if valid_lengths is None:
        return np.tile(np.array([t_cap, s_cap], dtype=np.int64), (batch_size, 1))
    lengths = np.array(valid_lengths, dtype=np.int64).reshape(-1, 2)
    if lengths.shape[0] != batch_size:
        raise ValueError(f"expected {batch_size} length pairs, got {lengths.shape[0]}")
    return lengths


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LikelihoodBatch:
    """B padded ``[T, S]`` float32 log-likelihood matrices with per-item ``(t_b, s_b)``.

    Construction copies ``values`` and runs :func:`validate_batch`, so an
    instance that exists is always a valid engine input.
    """

    values: np.ndarray
    valid_lengths: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float32, order="C", copy=True)
        if values.ndim == 2:
            values = values[None]
        if values.ndim != 3:
            raise ValueError(f"values must have shape [B, T, S], got {values.shape}")
        b, t, s = values.shape
        lengths = _as_lengths(self.valid_lengths, b, t, s)
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "valid_lengths", _freeze(lengths))
        validate_batch(self)

    @property
    def batch_size(self) -> int:
        return self.values.shape[0]

    @property
    def text_capacity(self) -> int:
        return self.values.shape[1]

    @property
    def speech_capacity(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def item(self, b: int) -> np.ndarray:
        """Read-only view of the valid ``[t_b, s_b]`` region of item ``b``."""
        t, s = self.valid_lengths[b]
        return self.values[b, :t, :s]


def validate_batch(batch: LikelihoodBatch) -> None:
    """Raise a :class:`ValidationError` subclass naming the first bad item."""
    b, t_cap, s_cap = batch.values.shape
    if b < 1 or t_cap < 1 or s_cap < 1:
        raise ZeroDim(f"empty batch shape {batch.values.shape}")
    if s_cap > S_MAX:
        raise LengthOutOfRange(f"speech capacity {s_cap} exceeds S_MAX={S_MAX}")
    for i, (t, s) in enumerate(batch.valid_lengths):
        if t < 1 or s < 1:
            raise ZeroDim(f"valid lengths must be >= 1, got (t={t}, s={s})", item=i)
        if t > t_cap or s > s_cap:
            raise LengthOutOfRange(f"valid lengths (t={t}, s={s}) exceed capacity ({t_cap}, {s_cap})", item=i)
        if t > s:
            raise InfeasibleLengths(f"text length {t} exceeds speech length {s}", item=i)
        if not np.isfinite(batch.values[i, :t, :s]).all():
            raise NonFinite("non-finite log-likelihood in valid region", item=i)


@dataclass(frozen=True, eq=False)
class AlignmentMatrix:
    """B binary ``[T, S]`` alignments, same shape as the likelihoods they came from."""

    values: np.ndarray
    valid_lengths: np.ndarray = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.uint8, order="C", copy=True)
        if values.ndim != 3:
            raise ValueError(f"values must have shape [B, T, S], got {values.shape}")
        b, t, s = values.shape
        lengths = _as_lengths(self.valid_lengths, b, t, s)
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "valid_lengths", _freeze(lengths))

    @classmethod
    def _adopt(cls, values: np.ndarray, valid_lengths: np.ndarray) -> AlignmentMatrix:
        """Wrap an engine-owned uint8 buffer without copying it."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "values", _freeze(values))
        object.__setattr__(obj, "valid_lengths", valid_lengths)
        return obj

    @property
    def batch_size(self) -> int:
        return self.values.shape[0]

    @property
    def text_capacity(self) -> int:
        return self.values.shape[1]

    @property
    def speech_capacity(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def path(self, b: int) -> np.ndarray:
        t, s = self.valid_lengths[b]
        return path_from_matrix(self.values[b, :t, :s])

    def __eq__(self, other):
        if not isinstance(other, AlignmentMatrix):
            return NotImplemented
        return (
            self.values.shape == other.values.shape
            and np.array_equal(self.valid_lengths, other.valid_lengths)
            and self.values.tobytes() == other.values.tobytes()
        )

    __hash__ = None


def check_path(path, t: int, s: int) -> np.ndarray:
    """Return ``path`` as an int64 array, raising InvalidPath if it is not monotonic."""
    p = np.asarray(path, dtype=np.int64)
    if p.ndim != 1 or p.shape[0] != s:
        raise InvalidPath(f"path must have length s={s}, got shape {p.shape}")
    if p[0] != 0 or p[-1] != t - 1:
        raise InvalidPath(f"path must start at 0 and end at t-1={t - 1}")
    steps = np.diff(p)
    if ((steps != 0) & (steps != 1)).any():
        raise InvalidPath("path steps must be 0 or 1")
    return p


def matrix_from_path(path, t: int, s: int) -> np.ndarray:
    p = check_path(path, t, s)
    m = np.zeros((t, s), dtype=np.uint8)
    m[p, np.arange(s)] = 1
    return m


def path_from_matrix(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got shape {m.shape}")
    ones = (m != 0).sum(axis=0)
    bad = np.flatnonzero(ones != 1)
    if bad.size:
        j = int(bad[0])
        raise InvalidMatrix(f"column {j + 1} has {int(ones[j])} ones, expected exactly 1")
    return np.argmax(m != 0, axis=0).astype(np.int64)


def check_alignment(alignment: AlignmentMatrix, like: LikelihoodBatch | None = None) -> None:
    """Assert every AlignmentMatrix/PathVector invariant; raise InvalidMatrix otherwise."""
    if like is not None:
        if alignment.shape != like.shape:
            raise InvalidMatrix(f"shape {alignment.shape} differs from input {like.shape}")
        if not np.array_equal(alignment.valid_lengths, like.valid_lengths):
            raise InvalidMatrix("valid lengths differ from input")
    for b, (t, s) in enumerate(alignment.valid_lengths):
        item = alignment.values[b]
        if item[t:].any() or item[:, s:].any():
            raise InvalidMatrix(f"item {b}: nonzero entries outside the valid region")
        try:
            check_path(path_from_matrix(item[:t, :s]), t, s)
        except InvalidPath as e:
            raise InvalidMatrix(f"item {b}: {e}") from None
