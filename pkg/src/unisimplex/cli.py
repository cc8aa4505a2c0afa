"""Command-line interface.

Exit codes: 0 success or all tests passed, 1 test failure or I/O error,
2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator, Sequence, TextIO

import numpy as np

from . import _backend
from .bench import MIN_REPETITIONS, measure_throughput, write_csv
from .marginal import MarginalModel
from .samplers import BudgetExceededError, SamplerMethod, iter_shards
from .stats import ALPHAS
from .verify import choose_oracle, verify_sampler

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_SEED = 42
FIG1B_ROWS = 5000
FIG1B_N = 3


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    n: int = 3
    count: int = 1
    method: SamplerMethod = SamplerMethod.STICK_BREAKING
    model: MarginalModel = MarginalModel.CORRECTED
    seed: int = DEFAULT_SEED
    alpha: float = 0.01
    out: str | None = None
    fmt: str = "csv"
    precision: int = 17
    jobs: int = 1
    header: bool = False
    samples: int = 50_000
    methods: tuple[SamplerMethod, ...] = (SamplerMethod.STICK_BREAKING,)
    n_list: tuple[int, ...] = (2, 8, 64, 512)
    batch: int | None = None
    repeats: int = 5

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"--n must be >= 2, got {self.n}")
        if self.count < 1:
            raise ValueError(f"--count must be >= 1, got {self.count}")
        if not 6 <= self.precision <= 17:
            raise ValueError(f"--precision must be in [6, 17], got {self.precision}")
        if self.jobs < 1:
            raise ValueError(f"--jobs must be >= 1, got {self.jobs}")
        if any(n < 2 for n in self.n_list):
            raise ValueError("every entry of --n-list must be >= 2")

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        fields = {"subcommand": ns.command}
        for name in cls.__dataclass_fields__:
            if name != "subcommand" and hasattr(ns, name):
                fields[name] = getattr(ns, name)
        if getattr(ns, "paper_literal", False):
            fields["model"] = MarginalModel.PAPER_LITERAL
        return cls(**fields)


# -- argument parsing --------------------------------------------------------


def _int_at_least(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return parse


def _seed(text: str) -> int:
    v = _int_at_least(0)(text)
    if v >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _precision(text: str) -> int:
    v = _int_at_least(6)(text)
    if v > 17:
        raise argparse.ArgumentTypeError(f"must be <= 17, got {v}")
    return v


def _alpha(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if v not in ALPHAS:
        raise argparse.ArgumentTypeError(f"alpha must be one of {ALPHAS}")
    return v


def _method(text: str) -> SamplerMethod:
    try:
        return SamplerMethod(text)
    except ValueError:
        choices = ", ".join(m.value for m in SamplerMethod)
        raise argparse.ArgumentTypeError(f"unknown method {text!r} (choose from {choices})") from None


def _method_list(text: str) -> tuple[SamplerMethod, ...]:
    return tuple(_method(t.strip()) for t in text.split(",") if t.strip())


def _n_list(text: str) -> tuple[int, ...]:
    parse = _int_at_least(2)
    items = tuple(parse(t.strip()) for t in text.split(",") if t.strip())
    if not items:
        raise argparse.ArgumentTypeError("empty --n-list")
    return items


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", dest="fmt", choices=("csv", "jsonl"), default="csv", help="output format (default: %(default)s)")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--precision", type=_precision, default=17, help="significant digits, 6..17 (default: %(default)s)")
    p.add_argument("--header", action="store_true", help="write an x1,...,xn header line (csv only)")


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--paper-literal",
        action="store_true",
        help="stick-breaking with the step-independent exponent 1/(n-1), known to be non-uniform "
        "(default: off, i.e. the corrected exponent 1/(n-j))",
    )


METHOD_HELP = "sampler: " + "|".join(m.value for m in SamplerMethod) + " (default: stick)"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unisimplex",
        description="Uniform random points on the probability simplex.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="generate points")
    p.add_argument("--n", type=_int_at_least(2), required=True, help="number of coordinates")
    p.add_argument("--count", type=_int_at_least(1), default=1, help="number of points (default: %(default)s)")
    p.add_argument("--method", type=_method, default="stick", help=METHOD_HELP)
    _add_model(p)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="64-bit seed (default: %(default)s)")
    p.add_argument("--jobs", type=_int_at_least(1), default=1, help="worker threads; output does not depend on it (default: %(default)s)")
    _add_output(p)

    p = sub.add_parser("test", help="run the goodness-of-fit battery on a sampler")
    p.add_argument("--n", type=_int_at_least(2), required=True, help="number of coordinates")
    p.add_argument("--method", type=_method, default="stick", help=METHOD_HELP)
    _add_model(p)
    p.add_argument("--samples", type=_int_at_least(50), default=50_000, help="points per sampler per run (default: %(default)s)")
    p.add_argument("--alpha", type=_alpha, default=0.01, help="significance level, 0.05 or 0.01 (default: %(default)s)")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="64-bit seed (default: %(default)s)")

    p = sub.add_parser("fig1b", help=f"{FIG1B_ROWS} stick-breaking points with n={FIG1B_N}")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="64-bit seed (default: %(default)s)")
    _add_output(p)

    p = sub.add_parser("bench", help="throughput and RNG-usage benchmark (CSV)")
    p.add_argument("--methods", type=_method_list, default="stick", help="comma-separated samplers (default: %(default)s)")
    p.add_argument("--n-list", type=_n_list, default="2,8,64,512", help="comma-separated dimensions (default: %(default)s)")
    _add_model(p)
    p.add_argument("--batch", type=_int_at_least(1), default=None, help="points per timed batch (default: ~2**21 uniforms)")
    p.add_argument("--repeats", type=_int_at_least(MIN_REPETITIONS), default=5, help="timed repetitions; the median is reported (default: %(default)s)")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="64-bit seed (default: %(default)s)")
    p.add_argument("--jobs", type=_int_at_least(1), default=1, help="parallel workers (aggregate throughput) (default: %(default)s)")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    return parser


# -- output ------------------------------------------------------------------


@contextmanager
def _open_out(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        yield fh


def format_rows(points: np.ndarray, fmt: str, precision: int) -> str:
    num = f"%.{precision}g"
    if fmt == "csv":
        lines = (",".join(num % v for v in row) for row in points.tolist())
    else:
        lines = ("[" + ",".join(num % v for v in row) + "]" for row in points.tolist())
    return "".join(line + "\n" for line in lines)


def write_points(shards, n: int, cfg: RunConfig, stream: TextIO) -> int:
    rows = 0
    if cfg.header and cfg.fmt == "csv":
        stream.write(",".join(f"x{i}" for i in range(1, n + 1)) + "\n")
    for shard in shards:
        stream.write(format_rows(shard, cfg.fmt, cfg.precision))
        rows += shard.shape[0]
    return rows


def read_points(path: str, fmt: str = "csv") -> np.ndarray:
    """Parse a file written by ``sample`` or ``fig1b`` back into an array."""
    import json

    with open(path, encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if fmt == "jsonl":
        return np.array([json.loads(ln) for ln in lines], dtype=np.float64)
    if lines and lines[0].startswith("x1"):
        lines = lines[1:]
    return np.array([[float(v) for v in ln.split(",")] for ln in lines], dtype=np.float64)


# -- commands ----------------------------------------------------------------


def cmd_sample(cfg: RunConfig) -> int:
    shards = iter_shards(cfg.method, cfg.n, cfg.count, cfg.seed, cfg.model, cfg.jobs)
    with _open_out(cfg.out) as stream:
        write_points(shards, cfg.n, cfg, stream)
    return EXIT_OK


def cmd_fig1b(cfg: RunConfig) -> int:
    shards = iter_shards(SamplerMethod.STICK_BREAKING, FIG1B_N, FIG1B_ROWS, cfg.seed, MarginalModel.CORRECTED)
    with _open_out(cfg.out) as stream:
        write_points(shards, FIG1B_N, cfg, stream)
    return EXIT_OK


def cmd_test(cfg: RunConfig, stream: TextIO | None = None) -> int:
    stream = stream or sys.stdout
    oracle = choose_oracle(cfg.method, cfg.n)
    print(
        f"# test n={cfg.n} method={cfg.method.value} model={cfg.model.value} samples={cfg.samples} "
        f"alpha={cfg.alpha} seed={cfg.seed} oracle={oracle.value} backend={_backend.BACKEND}",
        file=stream,
    )
    results = verify_sampler(cfg.method, cfg.n, cfg.samples, cfg.model, cfg.alpha, cfg.seed, oracle)
    for res in results:
        print(res.line(), file=stream)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"# FAIL: {len(failed)} of {len(results)} instruments rejected uniformity", file=stream)
        return EXIT_FAIL
    print(f"# PASS: all {len(results)} instruments", file=stream)
    return EXIT_OK


def cmd_bench(cfg: RunConfig) -> int:
    reports = (
        measure_throughput(m, n, cfg.batch, cfg.repeats, cfg.seed, cfg.model, jobs=cfg.jobs)
        for m in cfg.methods
        for n in cfg.n_list
    )
    with _open_out(cfg.out) as stream:
        write_csv(reports, stream)
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "test": cmd_test, "fig1b": cmd_fig1b, "bench": cmd_bench}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = RunConfig.from_args(ns)
    except ValueError as exc:
        parser.print_usage(sys.stderr)
        print(f"unisimplex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except BudgetExceededError as exc:
        print(f"unisimplex: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except BrokenPipeError:
        return EXIT_FAIL
    except OSError as exc:
        print(f"unisimplex: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except Exception as exc:  # noqa: BLE001
        print(f"unisimplex: internal error: {exc!r}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
