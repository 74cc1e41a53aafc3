"""Full timing sweep (T = 128..2048, B = 32, S = 4T) with a scaling fit per engine.

    python scripts/run_sweep.py --out results/sweep
"""

import argparse
import sys
from pathlib import Path

from mas_align.bench import BenchPlan, InsufficientPoints, emit_report, fit_scaling, run_bench
from mas_align.core import Engine, MasConfig


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="results/sweep", help="output prefix for .csv and .md")
    parser.add_argument("--t-max", type=int, default=2048)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--threads", type=int)
    args = parser.parse_args()

    plan = BenchPlan(
        t_values=list(range(128, args.t_max + 1, 128)),
        batch_size=args.batch_size,
        repeats=args.repeats,
        config=MasConfig(threads=args.threads),
    )
    report = run_bench(plan, log=sys.stderr)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".csv").write_text(emit_report(report, "csv"))
    out.with_suffix(".md").write_text(emit_report(report, "markdown"))
    print(emit_report(report, "markdown", include_environment=False))
    for engine in plan.engines:
        try:
            slope, r2 = fit_scaling(report, engine)
        except InsufficientPoints:
            continue
        print(f"{engine.value}: {slope * 1e6 / plan.batch_size:.3f} ns per cell, R^2 = {r2:.4f}")
    by_t = {}
    for row in report.rows:
        by_t.setdefault(row.T, {})[row.engine] = row.median_ms
    for t, cols in sorted(by_t.items()):
        if {Engine.REFERENCE.value, Engine.PARALLEL.value} <= set(cols):
            print(f"T={t}: parallel/reference = {cols['parallel'] / cols['reference']:.3f}")


if __name__ == "__main__":
    main()
