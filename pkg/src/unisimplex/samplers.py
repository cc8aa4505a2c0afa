"""Uniform samplers for the probability simplex.

Five methods share one calling convention and one stream discipline: a batch
of ``count`` points consumes the source exactly as ``count`` consecutive
single-point calls would.

* ``STICK_BREAKING``: sequential inverse-CDF draw of each coordinate from its
  conditional marginal given the ones before it; ``n - 1`` uniforms per point.
* ``REJECTION_CUBE``: draw ``n - 1`` cube coordinates, keep them if their sum
  is at most 1. Exact but needs about ``(n - 1)!`` trials per point.
* ``SORTED_SPACINGS``: gaps between sorted uniforms; ``n - 1`` uniforms.
* ``EXPONENTIAL_NORMALIZE``: normalised unit exponentials; ``n`` uniforms.
* ``RESCALED_UNIFORMS``: uniforms divided by their sum. Not uniform on the
  simplex; a negative control only.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _backend
from .marginal import DomainError, MarginalModel, inverse_unit, marginal_pdf, shape_exponent
from .source import SourceExhaustedError, UniformSource, substream

__all__ = [
    "SUM_TOL",
    "SHARD_SIZE",
    "BudgetExceededError",
    "SimplexPoint",
    "SamplerMethod",
    "SamplerStats",
    "default_max_trials",
    "sample_stick_breaking",
    "sample_rejection",
    "sample_sorted_spacings",
    "sample_exponential",
    "sample_rescaled_uniforms",
    "sample",
    "sample_batch",
    "iter_shards",
    "generate",
    "chain_density",
    "chain_log_density",
    "chain_log_density_batch",
]

SUM_TOL = 1e-12
CLAMP_TOL = 1e-12
SHARD_SIZE = 65536
_CHUNK_VALUES = 1 << 20


class BudgetExceededError(RuntimeError):
    """The rejection sampler hit its trial budget without accepting a point."""

    def __init__(self, trials: int, n: int):
        super().__init__(f"rejection sampler gave up after {trials} trials at n={n}")
        self.trials = trials
        self.n = n


class SamplerMethod(enum.Enum):
    STICK_BREAKING = "stick"
    REJECTION_CUBE = "rejection"
    SORTED_SPACINGS = "spacings"
    EXPONENTIAL_NORMALIZE = "exponential"
    RESCALED_UNIFORMS = "rescaled"

    @property
    def uniform(self) -> bool:
        """False for the negative control."""
        return self is not SamplerMethod.RESCALED_UNIFORMS


@dataclass(frozen=True)
class SimplexPoint:
    """A probability vector: non-negative coordinates summing to one."""

    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 2:
            raise DomainError(f"a simplex point needs n >= 2 coordinates, got {len(coords)}")
        for i, c in enumerate(coords):
            if not 0.0 <= c <= 1.0:
                raise DomainError(f"coordinate {i} = {c!r} outside [0, 1]")
        total = math.fsum(coords)
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"coordinates sum to {total!r}, not 1 within {SUM_TOL}")

    @property
    def n(self) -> int:
        return len(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass
class SamplerStats:
    """Counters a sampler adds to; draws are read off the source itself."""

    powers: int = 0
    trials: int = 0


def _check_n(n: int) -> None:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")


def _close_residual(coords: list[float], r: float) -> None:
    if r < 0.0:
        if r < -CLAMP_TOL:
            raise AssertionError(f"stick-breaking residual {r!r} below -{CLAMP_TOL}")
        big = max(range(len(coords)), key=coords.__getitem__)
        coords[big] += r
        r = 0.0
    coords.append(r)


def sample_stick_breaking(
    n: int,
    source: UniformSource,
    model: MarginalModel = MarginalModel.CORRECTED,
    stats: SamplerStats | None = None,
) -> SimplexPoint:
    """Draw one point by sequential inverse-CDF stick-breaking.

    Step ``j`` maps the ``j``-th uniform through the conditional quantile
    of coordinate ``j`` given the remaining mass ``r``, then shrinks ``r``.
    The last coordinate is whatever mass is left.
    """
    _check_n(n)
    coords: list[float] = []
    r = 1.0
    powers = 0
    for j in range(1, n):
        k = shape_exponent(model, n, j)
        x = r * inverse_unit(source.random(), k)
        if k != 1:
            powers += 1
        coords.append(x)
        r = r - x
    _close_residual(coords, r)
    if stats is not None:
        stats.powers += powers
    return SimplexPoint(tuple(coords))


def default_max_trials(n: int) -> int:
    return min(1000 * math.factorial(n - 1), 10**7)


def sample_rejection(
    n: int,
    source: UniformSource,
    max_trials: int | None = None,
    stats: SamplerStats | None = None,
) -> SimplexPoint:
    """Draw one point by rejection from the unit cube.

    Raises :class:`BudgetExceededError` after ``max_trials`` rejections
    (default ``1000 (n-1)!`` capped at 10**7). Practical only for n <= 10.
    """
    _check_n(n)
    if max_trials is None:
        max_trials = default_max_trials(n)
    trials = 0
    while True:
        trials += 1
        xs = [source.random() for _ in range(n - 1)]
        s = xs[0]
        for v in xs[1:]:
            s = s + v
        if s <= 1.0:
            xs.append(1.0 - s)
            if stats is not None:
                stats.trials += trials
            return SimplexPoint(tuple(xs))
        if trials >= max_trials:
            if stats is not None:
                stats.trials += trials
            raise BudgetExceededError(trials, n)


def sample_sorted_spacings(n: int, source: UniformSource) -> SimplexPoint:
    """Gaps between ``n - 1`` sorted uniforms, with 0 and 1 appended as endpoints."""
    _check_n(n)
    cuts = sorted(source.random() for _ in range(n - 1))
    edges = [0.0, *cuts, 1.0]
    return SimplexPoint(tuple(b - a for a, b in zip(edges, edges[1:])))


def _normalized(values: list[float]) -> tuple[float, ...] | None:
    s = values[0]
    for v in values[1:]:
        s = s + v
    if s == 0.0:
        return None
    return tuple(v / s for v in values)


def sample_exponential(n: int, source: UniformSource) -> SimplexPoint:
    """Normalise ``n`` unit exponentials ``-log(1 - u)``."""
    _check_n(n)
    while True:
        coords = _normalized([-math.log1p(-source.random()) for _ in range(n)])
        if coords is not None:
            return SimplexPoint(coords)


def sample_rescaled_uniforms(n: int, source: UniformSource) -> SimplexPoint:
    """Divide ``n`` uniforms by their sum. Deliberately NOT uniform on the simplex."""
    _check_n(n)
    while True:
        coords = _normalized([source.random() for _ in range(n)])
        if coords is not None:
            return SimplexPoint(coords)


def sample(
    method: SamplerMethod,
    n: int,
    source: UniformSource,
    model: MarginalModel = MarginalModel.CORRECTED,
    max_trials: int | None = None,
    stats: SamplerStats | None = None,
) -> SimplexPoint:
    """Draw a single point with ``method``. ``model`` only affects stick-breaking."""
    method = SamplerMethod(method)
    if method is SamplerMethod.STICK_BREAKING:
        return sample_stick_breaking(n, source, model, stats)
    if method is SamplerMethod.REJECTION_CUBE:
        return sample_rejection(n, source, max_trials, stats)
    if method is SamplerMethod.SORTED_SPACINGS:
        return sample_sorted_spacings(n, source)
    if method is SamplerMethod.EXPONENTIAL_NORMALIZE:
        return sample_exponential(n, source)
    return sample_rescaled_uniforms(n, source)


# -- batches ---------------------------------------------------------------


def _chunk_rows(width: int) -> int:
    return max(1, _CHUNK_VALUES // max(width, 1))


def _batch_stick(n, count, source, model, stats, kern):
    out = np.empty((count, n))
    step = _chunk_rows(n - 1)
    powers = 0
    for lo in range(0, count, step):
        hi = min(count, lo + step)
        u = source.take((hi - lo) * (n - 1)).reshape(hi - lo, n - 1)
        powers += int(kern.stick_breaking(u, out[lo:hi], model.literal))
    if stats is not None:
        stats.powers += powers
    return out


def _batch_rejection(n, count, source, max_trials, stats, kern):
    if max_trials is None:
        max_trials = default_max_trials(n)
    m = n - 1
    out = np.empty((count, n))
    filled = 0
    since = 0
    trials_total = 0
    expected = math.factorial(m)
    while filled < count:
        trials = min(max(int((count - filled) * expected * 1.1) + 64, 256), _chunk_rows(m))
        u = source.peek_upto(trials * m)
        u = u[:u.size - u.size % m]
        if u.size == 0:
            raise SourceExhaustedError(f"need {m} values for a rejection trial")
        filled, consumed, done, since, exceeded = kern.rejection_scan(
            u, m, out, filled, count, max_trials, since
        )
        source.skip(consumed)
        trials_total += done
        if exceeded:
            if stats is not None:
                stats.trials += trials_total
            raise BudgetExceededError(since, n)
    if stats is not None:
        stats.trials += trials_total
    return out


def _batch_spacings(n, count, source):
    out = np.empty((count, n))
    step = _chunk_rows(n - 1)
    for lo in range(0, count, step):
        hi = min(count, lo + step)
        cuts = np.sort(source.take((hi - lo) * (n - 1)).reshape(hi - lo, n - 1), axis=1)
        zeros = np.zeros((hi - lo, 1))
        ones = np.ones((hi - lo, 1))
        out[lo:hi] = np.diff(np.concatenate((zeros, cuts, ones), axis=1), axis=1)
    return out


def _batch_normalized(n, count, source, transform, scalar):
    # rows summing to exactly zero are redrawn in place, as in the scalar path
    out = np.empty((count, n))
    step = _chunk_rows(n)
    lo = 0
    while lo < count:
        hi = min(count, lo + step)
        raw = transform(source.peek((hi - lo) * n).reshape(hi - lo, n))
        s = raw[:, 0].copy()
        for t in range(1, n):
            s += raw[:, t]
        zero = np.flatnonzero(s == 0.0)
        good = int(zero[0]) if zero.size else hi - lo
        out[lo:lo + good] = raw[:good] / s[:good, None]
        source.skip(good * n)
        lo += good
        if zero.size:
            out[lo] = scalar(n, source).coords
            lo += 1
    return out


def _exp_transform(u):
    return -np.log1p(-u)


def sample_batch(
    method: SamplerMethod,
    n: int,
    count: int,
    source: UniformSource,
    model: MarginalModel = MarginalModel.CORRECTED,
    max_trials: int | None = None,
    stats: SamplerStats | None = None,
    backend: str | None = None,
) -> np.ndarray:
    """Draw ``count`` points as a ``(count, n)`` array.

    Consumes the source exactly like ``count`` calls of :func:`sample`.
    """
    method = SamplerMethod(method)
    _check_n(n)
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    kern = _backend.get_kernels(backend)
    if method is SamplerMethod.STICK_BREAKING:
        return _batch_stick(n, count, source, model, stats, kern)
    if method is SamplerMethod.REJECTION_CUBE:
        return _batch_rejection(n, count, source, max_trials, stats, kern)
    if method is SamplerMethod.SORTED_SPACINGS:
        return _batch_spacings(n, count, source)
    if method is SamplerMethod.EXPONENTIAL_NORMALIZE:
        return _batch_normalized(n, count, source, _exp_transform, sample_exponential)
    return _batch_normalized(n, count, source, np.asarray, sample_rescaled_uniforms)


def iter_shards(
    method: SamplerMethod,
    n: int,
    count: int,
    seed: int,
    model: MarginalModel = MarginalModel.CORRECTED,
    jobs: int = 1,
    shard_size: int = SHARD_SIZE,
    max_trials: int | None = None,
) -> Iterator[np.ndarray]:
    """Yield ``count`` points in fixed-size shards, in shard order.

    Shard ``k`` is drawn from substream ``(seed, k)``, so the output does not
    depend on ``jobs``.
    """
    sizes = [min(shard_size, count - lo) for lo in range(0, count, shard_size)]

    def run(k: int) -> np.ndarray:
        return sample_batch(method, n, sizes[k], substream(seed, k), model, max_trials)

    if jobs <= 1 or len(sizes) <= 1:
        for k in range(len(sizes)):
            yield run(k)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(run, range(len(sizes)))


def generate(method, n, count, seed, model=MarginalModel.CORRECTED, jobs=1, shard_size=SHARD_SIZE, max_trials=None):
    """All of :func:`iter_shards` stacked into one ``(count, n)`` array."""
    parts = list(iter_shards(method, n, count, seed, model, jobs, shard_size, max_trials))
    if not parts:
        return np.empty((0, n))
    return np.concatenate(parts)


# -- chain density ---------------------------------------------------------


def _as_point(point) -> SimplexPoint:
    return point if isinstance(point, SimplexPoint) else SimplexPoint(tuple(point))


def _chain_terms(model: MarginalModel, point: SimplexPoint) -> Iterator[float]:
    n = point.n
    r = 1.0
    for j in range(1, n):
        x = point[j - 1]
        if x > r:
            if x - r > CLAMP_TOL:
                raise DomainError(f"coordinate {j} exceeds the remaining mass {r!r}")
            x = r
        yield marginal_pdf(model, n, j, r, x)
        r = r - x
        if r <= 0.0:
            return  # only reachable after a zero term, so the product is settled


def chain_density(model: MarginalModel, point: SimplexPoint | Sequence[float]) -> float:
    """Product of the step-wise conditional densities at ``point``.

    Under the corrected model this is ``(n - 1)!`` at every interior point,
    the constant density of the uniform law in the first ``n - 1``
    coordinates. Under the literal model it varies from point to point.
    """
    out = 1.0
    for d in _chain_terms(model, _as_point(point)):
        out *= d
    return out


def chain_log_density(model: MarginalModel, point: SimplexPoint | Sequence[float]) -> float:
    """Log of :func:`chain_density`; safe for large ``n``."""
    total = 0.0
    for d in _chain_terms(model, _as_point(point)):
        if d == 0.0:
            return -math.inf
        total += math.log(d)
    return total


def chain_log_density_batch(model: MarginalModel, points: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Vectorised :func:`chain_log_density` over the rows of ``points``."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise DomainError("points must be a (count, n) array with n >= 2")
    out = np.empty(pts.shape[0])
    _backend.get_kernels(backend).chain_log_density(pts, out, model.literal)
    return out
