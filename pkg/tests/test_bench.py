import csv
import io
import math
from fractions import Fraction

import pytest

from unisimplex import MarginalModel, SamplerMethod
from unisimplex.bench import (
    CSV_COLUMNS,
    BenchReport,
    audit_draws,
    default_batch,
    measure_throughput,
    write_csv,
)

M = SamplerMethod


def test_audit_examples():
    assert audit_draws(M.STICK_BREAKING, 10, 1000) == (9, 8)
    assert audit_draws(M.SORTED_SPACINGS, 10, 1000) == (9, 0)
    assert audit_draws(M.EXPONENTIAL_NORMALIZE, 10, 1000) == (10, 0)
    assert audit_draws(M.RESCALED_UNIFORMS, 10, 1000) == (10, 0)


def test_audit_literal_mode_counts_every_non_final_power():
    assert audit_draws(M.STICK_BREAKING, 10, 100, MarginalModel.PAPER_LITERAL) == (9, 9)
    assert audit_draws(M.STICK_BREAKING, 2, 100, MarginalModel.PAPER_LITERAL) == (1, 0)


def test_audit_rejection_near_eighteen():
    draws, powers = audit_draws(M.REJECTION_CUBE, 4, 20_000, seed=3)
    assert isinstance(draws, Fraction)
    # per-sample draws: 3 x geometric(1/6) trials, sd = 3 sqrt(30)
    assert abs(float(draws) - 18) < 5 * 3 * math.sqrt(30) / math.sqrt(20_000)
    assert powers == 0


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8, 17, 64, 100, 255, 512, 1000, 1023, 1024, 2047, 4095, 4096])
def test_stick_draw_count_spot_grid(n, backend):
    for seed in (0, 1, 2**63 + 5):
        assert audit_draws(M.STICK_BREAKING, n, 3, seed=seed, backend=backend) == (n - 1, n - 2)


def test_audit_rejects_empty_batch():
    with pytest.raises(ValueError):
        audit_draws(M.STICK_BREAKING, 3, 0)


def test_default_batch_sizes():
    assert default_batch(M.STICK_BREAKING, 2) == 2**21
    assert default_batch(M.STICK_BREAKING, 4097) == 512
    assert default_batch(M.REJECTION_CUBE, 8) == 2**21 // (7 * 5040)
    assert default_batch(M.REJECTION_CUBE, 20) == 16


def test_report_fields_are_exact():
    rep = BenchReport(M.REJECTION_CUBE, 4, 3, 0.5, 55, 0)
    assert rep.draws_per_sample == Fraction(55, 3)
    assert rep.samples_per_s == 6.0
    assert rep.row() == ["rejection", "4", "3", "500.0000", "6", "18.3333", "0"]


def test_throughput_is_deterministic_in_counts():
    for method in (M.STICK_BREAKING, M.REJECTION_CUBE):
        a = measure_throughput(method, 5, batch=500, repetitions=5, seed=9)
        b = measure_throughput(method, 5, batch=500, repetitions=5, seed=9)
        assert (a.total_draws, a.total_powers) == (b.total_draws, b.total_powers)
        assert a.wall_s > 0


def test_parallel_mode_aggregates_workers():
    rep = measure_throughput(M.STICK_BREAKING, 6, batch=1000, repetitions=5, jobs=3)
    assert rep.batch == 3000 and rep.jobs == 3
    assert rep.draws_per_sample == 5 and rep.powers_per_sample == 4


def test_csv_layout():
    reports = [
        measure_throughput(M.STICK_BREAKING, n, batch=200, repetitions=5) for n in (2, 8)
    ]
    buf = io.StringIO()
    write_csv(reports, buf)
    text = buf.getvalue()
    assert "\r" not in text and text.endswith("\n")
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [r[0] for r in rows[1:]] == ["stick", "stick"]
    assert [r[5] for r in rows[1:]] == ["1", "7"]
    assert [r[6] for r in rows[1:]] == ["0", "6"]
    for r in rows[1:]:
        float(r[3]), float(r[4])


def test_csv_without_header():
    buf = io.StringIO()
    write_csv([BenchReport(M.STICK_BREAKING, 3, 10, 0.01, 20, 10)], buf, header=False)
    assert buf.getvalue() == "stick,3,10,10.0000,1000,2,1\n"


@pytest.mark.slow
def test_stick_cost_monotone_in_n():
    grid = (2, 8, 64, 512, 4096)
    costs = [measure_throughput(M.STICK_BREAKING, n, repetitions=7).seconds_per_sample for n in grid]
    assert all(a <= b for a, b in zip(costs, costs[1:])), costs


def test_too_few_repetitions_refused():
    with pytest.raises(ValueError):
        measure_throughput(M.STICK_BREAKING, 3, batch=10, repetitions=4)
