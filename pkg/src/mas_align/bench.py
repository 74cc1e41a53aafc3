"""Timing harness: random batches, T sweep with S = s_ratio * T, percentile report."""

from __future__ import annotations

import csv
import io
import platform
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Engine, LikelihoodBatch, MasConfig, MasError
from .engines import ALIGNERS
from .parallel import default_threads

CSV_COLUMNS = ["engine", "T", "S", "B", "mean_ms", "median_ms", "p20_ms", "p80_ms"]


class EmptyReport(MasError, ValueError):
    pass


class InsufficientPoints(MasError, ValueError):
    pass


@dataclass
class BenchPlan:
    t_values: list[int] = field(default_factory=lambda: list(range(128, 2049, 128)))
    batch_size: int = 32
    s_ratio: int = 4
    repeats: int = 20
    warmup: int = 3
    engines: list[Engine] = field(default_factory=lambda: [Engine.REFERENCE, Engine.PARALLEL])
    seed: int = 0
    config: MasConfig = field(default_factory=MasConfig)

    def __post_init__(self):
        self.engines = [Engine(e) for e in self.engines]
        if not self.t_values or min(self.t_values) < 1:
            raise ValueError("t_values must be non-empty and >= 1")
        if self.repeats < 1 or self.warmup < 0 or self.batch_size < 1 or self.s_ratio < 1:
            raise ValueError("repeats, batch_size, s_ratio must be >= 1 and warmup >= 0")


@dataclass(frozen=True)
class BenchRow:
    engine: str
    T: int
    S: int
    B: int
    mean_ms: float
    median_ms: float
    p20_ms: float
    p80_ms: float

    @classmethod
    def from_samples(cls, engine: str, T: int, S: int, B: int, samples_ms) -> BenchRow:
        x = np.asarray(samples_ms, dtype=np.float64)
        p20, med, p80 = np.percentile(x, [20, 50, 80])
        return cls(engine, T, S, B, float(x.mean()), float(med), float(p20), float(p80))


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    environment: dict[str, str] = field(default_factory=dict)

    def rows_for(self, engine) -> list[BenchRow]:
        name = Engine(engine).value
        return [r for r in self.rows if r.engine == name]


def generate_random_batch(B: int, T: int, S: int, seed: int) -> LikelihoodBatch:
    """i.i.d. uniform [-5, 5] float32 log-likelihoods, every item full length."""
    if min(B, T, S) < 1 or T > S:
        raise ValueError(f"need B, T, S >= 1 and T <= S, got {(B, T, S)}")
    rng = np.random.default_rng(seed)
    values = rng.uniform(-5.0, 5.0, size=(B, T, S)).astype(np.float32)
    return LikelihoodBatch(values)


def cpu_model() -> str:
    try:
        with open("/proc/cpuinfo") as f:
            for line in f:
                if line.startswith("model name"):
                    return line.split(":", 1)[1].strip()
    except OSError:
        pass
    return platform.processor() or platform.machine()


def environment(plan: BenchPlan) -> dict[str, str]:
    import numba

    return {
        "cpu": cpu_model(),
        "threads": str(plan.config.threads or default_threads()),
        "build": f"python {platform.python_version()}, numpy {np.__version__}, numba {numba.__version__}",
        "platform": platform.platform(),
        "protocol": f"seed={plan.seed} warmup={plan.warmup} repeats={plan.repeats} s_ratio={plan.s_ratio}",
    }


def time_call(fn, arg, repeats: int, warmup: int, timer=time.perf_counter_ns) -> list[float]:
    """Wall-clock ``fn(arg)`` in ms; only the call sits between the two timer reads."""
    for _ in range(warmup):
        fn(arg)
    samples = []
    for _ in range(repeats):
        t0 = timer()
        fn(arg)
        t1 = timer()
        samples.append((t1 - t0) / 1e6)
    return samples


def run_bench(plan: BenchPlan, timer=time.perf_counter_ns, aligners=None, log=None) -> BenchReport:
    aligners = aligners or ALIGNERS
    report = BenchReport(environment=environment(plan))
    for T in plan.t_values:
        S = plan.s_ratio * T
        batch = generate_random_batch(plan.batch_size, T, S, seed=plan.seed + T)
        for engine in plan.engines:
            cfg = replace(plan.config, engine=engine)
            fn = aligners[engine]
            samples = time_call(lambda b: fn(b, cfg), batch, plan.repeats, plan.warmup, timer)
            row = BenchRow.from_samples(engine.value, T, S, plan.batch_size, samples)
            report.rows.append(row)
            if log:
                print(f"{engine.value:>9} T={T:<5} S={S:<6} median {row.median_ms:10.3f} ms", file=log)
    return report


def emit_report(report: BenchReport, fmt: str = "csv", include_environment: bool = True) -> str:
    if not report.rows:
        raise EmptyReport("report has no rows")
    if fmt == "csv":
        return _emit_csv(report, include_environment)
    if fmt == "markdown":
        return _emit_markdown(report, include_environment)
    raise ValueError(f"unknown format {fmt!r}")


def _emit_csv(report: BenchReport, include_environment: bool) -> str:
    buf = io.StringIO()
    if include_environment:
        for k, v in report.environment.items():
            buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow([r.engine, r.T, r.S, r.B] + [f"{x:.6f}" for x in (r.mean_ms, r.median_ms, r.p20_ms, r.p80_ms)])
    return buf.getvalue()


def _emit_markdown(report: BenchReport, include_environment: bool) -> str:
    engines = list(dict.fromkeys(r.engine for r in report.rows))
    ts = sorted({r.T for r in report.rows})
    cell = {(r.engine, r.T): r.median_ms for r in report.rows}
    lines = []
    if include_environment:
        lines += [f"<!-- {k}: {v} -->" for k, v in report.environment.items()]
    lines.append("| T | " + " | ".join(engines) + " |")
    lines.append("|---:|" + "---:|" * len(engines))
    for t in ts:
        vals = [f"{cell[(e, t)]:.6f}" if (e, t) in cell else "" for e in engines]
        lines.append(f"| {t} | " + " | ".join(vals) + " |")
    lines.append("")
    lines.append("Median execution time in milliseconds.")
    return "\n".join(lines) + "\n"


def fit_scaling(report: BenchReport, engine) -> tuple[float, float]:
    """Least-squares fit of median time against T*S; returns (ms per cell, R^2).

    R^2 is reported as 0.0 when the medians have no variance at all.
    """
    rows = report.rows_for(engine)
    if len({r.T for r in rows}) < 4:
        raise InsufficientPoints(f"need >= 4 distinct T values for {engine}, got {len({r.T for r in rows})}")
    x = np.array([r.T * r.S for r in rows], dtype=np.float64)
    y = np.array([r.median_ms for r in rows], dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return float(slope), 0.0
    ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
    return float(slope), 1.0 - ss_res / ss_tot

