"""Random small instances checked against both engines and the brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Engine, LikelihoodBatch, MasConfig, check_alignment
from .engines import ALIGNERS
from .oracle import best_paths
from .parallel import backward_parallel, forward_parallel
from .reference import backward_reference, forward_reference

SCORE_RTOL = 1e-5


@dataclass
class Mismatch:
    seed: int
    t: int
    s: int
    reason: str


@dataclass
class VerifyResult:
    trials: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def random_instance(seed: int, t_max: int, s_max: int) -> tuple[np.ndarray, int, int]:
    rng = np.random.default_rng(seed)
    t = int(rng.integers(1, t_max + 1))
    s = int(rng.integers(t, s_max + 1))
    q = rng.uniform(-5.0, 5.0, size=(t, s)).astype(np.float32)
    return q, t, s


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= SCORE_RTOL * max(abs(a), abs(b), 1.0)


def check_instance(q: np.ndarray, t: int, s: int, cfg: MasConfig | None = None, aligners=None) -> list[str]:
    """Return a list of problems (empty when both engines agree with the oracle)."""
    cfg = cfg or MasConfig()
    aligners = aligners or ALIGNERS
    problems = []
    best, optima = best_paths(q, t, s)

    Q = forward_reference(q, t, s, cfg)
    scores = q.copy()
    forward_parallel(scores, t, s, cfg)
    direct = {
        "reference": (float(Q[t - 1, s - 1]), backward_reference(Q, t, s)),
        "parallel": (float(scores[t - 1, s - 1]), backward_parallel(scores, t, s)),
    }
    for name, (score, _) in direct.items():
        if not _close(score, best):
            problems.append(f"{name} forward score {score!r} != oracle {best!r}")

    batch = LikelihoodBatch(q[None])
    for engine in (Engine.REFERENCE, Engine.PARALLEL):
        alignment = aligners[engine](batch, cfg)
        try:
            check_alignment(alignment, batch)
        except ValueError as e:
            problems.append(f"{engine.value}: {e}")
            continue
        path = alignment.path(0)
        if not np.array_equal(path, direct[engine.value][1]):
            problems.append(f"{engine.value}: align path differs from its own backward pass")
        if len(optima) == 1:
            if not np.array_equal(path, optima[0]):
                problems.append(f"{engine.value}: path {(path + 1).tolist()} != unique optimum {(optima[0] + 1).tolist()}")
        elif not any(np.array_equal(path, p) for p in optima):
            problems.append(f"{engine.value}: path {(path + 1).tolist()} is not among {len(optima)} optima")
    return problems


def run_verification(
    trials: int, t_max: int = 6, s_max: int = 10, seed: int = 0, cfg: MasConfig | None = None, aligners=None
) -> VerifyResult:
    result = VerifyResult()
    for k in range(trials):
        trial_seed = seed + k
        q, t, s = random_instance(trial_seed, t_max, s_max)
        result.trials += 1
        for reason in check_instance(q, t, s, cfg, aligners):
            result.mismatches.append(Mismatch(trial_seed, t, s, reason))
    return result
