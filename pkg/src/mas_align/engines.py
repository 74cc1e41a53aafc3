from __future__ import annotations

from .core import AlignmentMatrix, Engine, LikelihoodBatch, MasConfig
from .parallel import align_parallel
from .reference import align_reference

ALIGNERS = {
    Engine.REFERENCE: align_reference,
    Engine.PARALLEL: align_parallel,
}


def align(batch: LikelihoodBatch, cfg: MasConfig | None = None) -> AlignmentMatrix:
    """Run the engine selected by ``cfg.engine`` (parallel by default)."""
    cfg = cfg or MasConfig()
    return ALIGNERS[cfg.engine](batch, cfg)
