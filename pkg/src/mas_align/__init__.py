"""Monotonic alignment search on CPU: a sequential reference engine and an
in-place, lane-vectorized parallel engine with identical outputs."""

from .core import (
    AlignmentMatrix,
    Engine,
    LanePadding,
    LikelihoodBatch,
    MasConfig,
    check_alignment,
    matrix_from_path,
    path_from_matrix,
    validate_batch,
)
from .engines import align
from .parallel import align_parallel, backward_parallel, forward_parallel, pad_lanes
from .reference import align_reference, backward_reference, forward_reference

__all__ = [
    "AlignmentMatrix",
    "Engine",
    "LanePadding",
    "LikelihoodBatch",
    "MasConfig",
    "align",
    "align_parallel",
    "align_reference",
    "backward_parallel",
    "backward_reference",
    "check_alignment",
    "forward_parallel",
    "forward_reference",
    "matrix_from_path",
    "pad_lanes",
    "path_from_matrix",
    "validate_batch",
]
