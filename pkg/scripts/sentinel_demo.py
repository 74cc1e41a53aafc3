"""Show how a -1e9 stand-in for -inf corrupts alignments once feasible scores pass -1e9.

    python scripts/sentinel_demo.py --t 1536 --s 2048
"""

import argparse

import numpy as np

from mas_align import LikelihoodBatch, MasConfig, align_parallel, align_reference


def infeasible(alignment):
    _, i, j = np.nonzero(alignment.values)
    return int((i > j).sum())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--t", type=int, default=1536)
    parser.add_argument("--s", type=int, default=2048)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    batch = LikelihoodBatch(rng.uniform(-1e8, -1e7, size=(1, args.t, args.s)).astype(np.float32))
    for neg in (-1e32, -1e9):
        cfg = MasConfig(max_neg_val=neg, allow_weak_sentinel=True)
        for align in (align_reference, align_parallel):
            out = align(batch, cfg)
            print(f"max_neg_val={neg:g} {align.__name__:>15}: {infeasible(out)} cells with text index > frame index")


if __name__ == "__main__":
    main()
