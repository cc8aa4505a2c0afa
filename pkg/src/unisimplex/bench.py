"""Throughput and RNG-usage measurements for the samplers."""

from __future__ import annotations

import csv
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, TextIO

from . import _backend
from .marginal import MarginalModel
from .samplers import SamplerMethod, SamplerStats, sample_batch
from .source import UniformSource, substream

__all__ = [
    "CSV_COLUMNS",
    "MIN_REPETITIONS",
    "BenchReport",
    "audit_draws",
    "default_batch",
    "measure_throughput",
    "write_csv",
]

CSV_COLUMNS = ("method", "n", "batch", "wall_ms", "samples_per_s", "draws_per_sample", "powers_per_sample")
_VALUE_BUDGET = 1 << 21
MIN_REPETITIONS = 5


@dataclass(frozen=True)
class BenchReport:
    method: SamplerMethod
    n: int
    batch: int
    wall_s: float
    total_draws: int
    total_powers: int
    backend: str = _backend.BACKEND
    jobs: int = 1

    @property
    def wall_ms(self) -> float:
        return self.wall_s * 1e3

    @property
    def samples_per_s(self) -> float:
        return self.batch / self.wall_s if self.wall_s > 0 else math.inf

    @property
    def seconds_per_sample(self) -> float:
        return self.wall_s / self.batch

    @property
    def draws_per_sample(self) -> Fraction:
        return Fraction(self.total_draws, self.batch)

    @property
    def powers_per_sample(self) -> Fraction:
        return Fraction(self.total_powers, self.batch)

    def row(self) -> list[str]:
        return [
            self.method.value,
            str(self.n),
            str(self.batch),
            f"{self.wall_ms:.4f}",
            f"{self.samples_per_s:.6g}",
            _fmt_ratio(self.draws_per_sample),
            _fmt_ratio(self.powers_per_sample),
        ]


def _fmt_ratio(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{float(q):.6g}"


def default_batch(method: SamplerMethod, n: int) -> int:
    """Batch size holding roughly 2**21 uniforms, so per-call overhead is negligible."""
    method = SamplerMethod(method)
    per_sample = n if method in (SamplerMethod.EXPONENTIAL_NORMALIZE, SamplerMethod.RESCALED_UNIFORMS) else n - 1
    if method is SamplerMethod.REJECTION_CUBE:
        per_sample *= math.factorial(n - 1)
    return max(16, _VALUE_BUDGET // max(per_sample, 1))


def _run_once(method, n, batch, source, model, backend):
    stats = SamplerStats()
    before = source.draw_count
    t0 = time.perf_counter()
    sample_batch(method, n, batch, source, model, stats=stats, backend=backend)
    wall = time.perf_counter() - t0
    return wall, source.draw_count - before, stats.powers


def audit_draws(
    method: SamplerMethod,
    n: int,
    batch: int,
    model: MarginalModel = MarginalModel.CORRECTED,
    seed: int = 0,
    backend: str | None = None,
) -> tuple[Fraction, Fraction]:
    """Exact (draws per sample, fractional powers per sample) over one batch."""
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    _, draws, powers = _run_once(SamplerMethod(method), n, batch, UniformSource(seed), model, backend)
    return Fraction(draws, batch), Fraction(powers, batch)


def measure_throughput(
    method: SamplerMethod,
    n: int,
    batch: int | None = None,
    repetitions: int = 5,
    seed: int = 0,
    model: MarginalModel = MarginalModel.CORRECTED,
    backend: str | None = None,
    jobs: int = 1,
) -> BenchReport:
    """Median wall time of ``repetitions`` identical seeded batches.

    One warm-up batch is run first and discarded. With ``jobs > 1`` each
    worker draws ``batch`` points from its own substream and the report
    covers the aggregate of ``jobs * batch`` points.
    """
    method = SamplerMethod(method)
    if repetitions < MIN_REPETITIONS:
        raise ValueError(f"need at least {MIN_REPETITIONS} timed repetitions, got {repetitions}")
    if batch is None:
        batch = default_batch(method, n)
    backend_name = backend or _backend.BACKEND

    if jobs <= 1:

        def one_rep():
            return _run_once(method, n, batch, UniformSource(seed), model, backend)

    else:

        def one_rep():
            sources = [substream(seed, w) for w in range(jobs)]
            t0 = time.perf_counter()
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                parts = list(pool.map(lambda s: _run_once(method, n, batch, s, model, backend), sources))
            wall = time.perf_counter() - t0
            return wall, sum(p[1] for p in parts), sum(p[2] for p in parts)

    one_rep()
    runs = [one_rep() for _ in range(repetitions)]
    wall = statistics.median(r[0] for r in runs)
    _, draws, powers = runs[0]
    return BenchReport(method, n, batch * max(1, jobs), wall, draws, powers, backend_name, max(1, jobs))


def write_csv(reports: Iterable[BenchReport], stream: TextIO, header: bool = True) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow(rep.row())
