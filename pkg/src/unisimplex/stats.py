"""Goodness-of-fit checks for simplex samplers.

Four independent instruments:

* one-sample Kolmogorov-Smirnov against an analytic marginal CDF;
* two-sample Kolmogorov-Smirnov against an oracle sampler;
* the probability integral transform (PIT) followed by a uniform KS test;
* first and second moments against their Dirichlet(1, ..., 1) values.

Critical values are asymptotic; samples below 50 points are refused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .marginal import DomainError, MarginalModel
from .samplers import SimplexPoint

__all__ = [
    "ALPHAS",
    "UsageError",
    "EmpiricalSample",
    "TestReport",
    "MomentReport",
    "kolmogorov_sf",
    "kolmogorov_critical",
    "chi2_quantile",
    "first_coordinate_cdf",
    "ks_one_sample",
    "ks_two_sample",
    "chi_square_marginal",
    "pit_transform",
    "pit_uniformity",
    "moment_targets",
    "moment_check",
]

ALPHAS = (0.05, 0.01)
MIN_KS_SIZE = 50
MIN_MOMENT_SIZE = 10_000
MIN_BIN_COUNT = 20
MOMENT_SE_LIMIT = 5.0

CDF = Callable[[np.ndarray], np.ndarray]


class UsageError(ValueError):
    """A statistical test was called outside its validity conditions."""


def _check_alpha(alpha: float) -> None:
    if alpha not in ALPHAS:
        raise UsageError(f"alpha must be one of {ALPHAS}, got {alpha}")


@dataclass(frozen=True)
class EmpiricalSample:
    """Sorted finite sample values."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).ravel()  # own copy; frozen below
        if v.size < 1:
            raise UsageError("an empirical sample needs at least one value")
        if not np.all(np.isfinite(v)):
            raise UsageError("sample values must be finite")
        if np.any(v[1:] < v[:-1]):
            raise UsageError("sample values must be sorted non-decreasing; use EmpiricalSample.of")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, values) -> "EmpiricalSample":
        """Sort ``values`` and wrap them."""
        return cls(np.sort(np.asarray(values, dtype=np.float64).ravel()))

    @property
    def size(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.size


def _as_sample(sample) -> EmpiricalSample:
    return sample if isinstance(sample, EmpiricalSample) else EmpiricalSample(sample)


@dataclass(frozen=True)
class TestReport:
    name: str
    statistic: float
    critical: float
    alpha: float
    sizes: tuple[int, ...]

    __test__ = False  # not a pytest class

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical

    @property
    def ratio(self) -> float:
        return self.statistic / self.critical

    def line(self) -> str:
        sizes = ",".join(str(s) for s in self.sizes)
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict}  {self.name}: statistic={self.statistic:.6g} critical={self.critical:.6g} "
            f"alpha={self.alpha} N={sizes}"
        )


# -- Kolmogorov distribution ----------------------------------------------


def kolmogorov_sf(lam: float) -> float:
    """Limiting tail ``Q(lam) = 2 sum_{k>=1} (-1)**(k-1) exp(-2 k**2 lam**2)``."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 200):
        term = math.exp(-2.0 * k * k * lam * lam)
        total += term if k % 2 else -term
        if term < 1e-17:
            break
    return min(1.0, max(0.0, 2.0 * total))


def kolmogorov_critical(alpha: float) -> float:
    """The ``lam`` with ``Q(lam) = alpha``, by bisection."""
    if not 0.0 < alpha < 1.0:
        raise UsageError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = 0.3, 5.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def chi2_quantile(p: float, df: int) -> float:
    """Wilson-Hilferty approximation to the chi-square ``p`` quantile."""
    z = NormalDist().inv_cdf(p)
    c = 2.0 / (9.0 * df)
    return df * (1.0 - c + z * math.sqrt(c)) ** 3


def first_coordinate_cdf(n: int) -> CDF:
    """CDF ``1 - (1 - x)**(n - 1)`` of any single coordinate of a uniform point."""
    k = n - 1

    def cdf(x):
        x = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
        return -np.expm1(k * np.log1p(-x)) if k != 1 else x

    return cdf


def _uniform_cdf(x):
    return np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)


# -- tests -------------------------------------------------------------------


def ks_one_sample(sample, cdf: CDF, alpha: float = 0.01, name: str = "ks_one_sample") -> TestReport:
    """One-sample KS test of ``sample`` against the continuous ``cdf``.

    ``cdf`` must accept a numpy array. The statistic is the largest gap
    between the empirical step function and ``cdf`` at the sample points.
    """
    _check_alpha(alpha)
    s = _as_sample(sample)
    n = s.size
    if n < MIN_KS_SIZE:
        raise UsageError(f"KS needs N >= {MIN_KS_SIZE}, got {n}")
    f = np.asarray(cdf(s.values), dtype=np.float64)
    i = np.arange(1, n + 1)
    d = max(np.max(np.abs(i / n - f)), np.max(np.abs((i - 1) / n - f)))
    crit = kolmogorov_critical(alpha) / math.sqrt(n)
    return TestReport(name, float(d), crit, alpha, (n,))


def ks_two_sample(a, b, alpha: float = 0.01, name: str = "ks_two_sample") -> TestReport:
    """Two-sample KS test: largest gap between the two empirical CDFs."""
    _check_alpha(alpha)
    sa, sb = _as_sample(a), _as_sample(b)
    na, nb = sa.size, sb.size
    if min(na, nb) < MIN_KS_SIZE:
        raise UsageError(f"KS needs N >= {MIN_KS_SIZE} on both sides, got {na} and {nb}")
    grid = np.concatenate((sa.values, sb.values))
    fa = np.searchsorted(sa.values, grid, side="right") / na
    fb = np.searchsorted(sb.values, grid, side="right") / nb
    d = float(np.max(np.abs(fa - fb)))
    crit = kolmogorov_critical(alpha) * math.sqrt((na + nb) / (na * nb))
    return TestReport(name, d, crit, alpha, (na, nb))


def chi_square_marginal(
    sample, cdf: CDF, bins: int = 50, alpha: float = 0.01, name: str = "chi_square_marginal"
) -> TestReport:
    """Pearson chi-square over ``bins`` cells that are equiprobable under ``cdf``.

    A value ``v`` falls in cell ``floor(bins * cdf(v))``, which is the same
    as binning ``v`` between the ``b / bins`` quantiles of ``cdf``.
    """
    _check_alpha(alpha)
    s = _as_sample(sample)
    n = s.size
    if bins < 10:
        raise UsageError(f"chi-square needs at least 10 bins, got {bins}")
    expected = n / bins
    if expected < MIN_BIN_COUNT:
        raise UsageError(f"expected count per bin is {expected:.3g} < {MIN_BIN_COUNT}")
    u = np.asarray(cdf(s.values), dtype=np.float64)
    cell = np.minimum((u * bins).astype(np.int64), bins - 1)
    observed = np.bincount(cell, minlength=bins)
    stat = float(np.sum((observed - expected) ** 2) / expected)
    crit = chi2_quantile(1.0 - alpha, bins - 1)
    return TestReport(name, stat, crit, alpha, (n,))


def _points_array(points) -> np.ndarray:
    if not isinstance(points, np.ndarray):
        points = [p.coords if isinstance(p, SimplexPoint) else p for p in points]
    return np.ascontiguousarray(points, dtype=np.float64)


def pit_transform(points, model: MarginalModel = MarginalModel.CORRECTED, backend: str | None = None) -> np.ndarray:
    """Map each point to its ``n - 1`` step-wise conditional CDF values.

    Output is flat and point-major. For uniform points under the corrected
    model the values are i.i.d. uniform on [0, 1].
    """
    pts = _points_array(points)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise DomainError("points must form a (count, n) array with n >= 2")
    if not np.all(np.isfinite(pts)) or np.any(pts < 0.0) or np.any(pts > 1.0):
        raise DomainError("points must have finite coordinates in [0, 1]")
    if np.any(np.abs(pts.sum(axis=1) - 1.0) > 1e-9):
        raise DomainError("every point must sum to 1")
    out = np.empty((pts.shape[0], pts.shape[1] - 1))
    _backend.get_kernels(backend).pit(pts, out, model.literal)
    return out.ravel()


def pit_uniformity(points, alpha: float = 0.01, name: str = "pit_uniformity") -> TestReport:
    """KS test of the corrected-model PIT values against the uniform CDF."""
    return ks_one_sample(EmpiricalSample.of(pit_transform(points)), _uniform_cdf, alpha, name)


@dataclass(frozen=True)
class MomentReport:
    """Sample moments of a batch of points against Dirichlet(1, ..., 1) targets."""

    n: int
    size: int
    means: np.ndarray
    mean_se: np.ndarray
    mean_target: float
    variances: np.ndarray
    variance_se: np.ndarray
    variance_target: float
    covariance: float
    covariance_se: float
    covariance_target: float
    limit: float = field(default=MOMENT_SE_LIMIT)

    @property
    def mean_pass(self) -> np.ndarray:
        return np.abs(self.means - self.mean_target) < self.limit * self.mean_se

    @property
    def variance_pass(self) -> np.ndarray:
        return np.abs(self.variances - self.variance_target) < self.limit * self.variance_se

    @property
    def covariance_pass(self) -> bool:
        return bool(abs(self.covariance - self.covariance_target) < self.limit * self.covariance_se)

    @property
    def passed(self) -> bool:
        return bool(self.mean_pass.all() and self.variance_pass.all() and self.covariance_pass)

    def worst_z(self) -> float:
        """Largest deviation in units of standard error."""
        zs = [
            np.max(np.abs(self.means - self.mean_target) / self.mean_se),
            np.max(np.abs(self.variances - self.variance_target) / self.variance_se),
            abs(self.covariance - self.covariance_target) / self.covariance_se,
        ]
        return float(max(zs))

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict}  moment_check: worst deviation {self.worst_z():.3g} SE (limit {self.limit:g}) "
            f"n={self.n} N={self.size}"
        )


def moment_targets(n: int) -> tuple[float, float, float]:
    """Mean, variance and covariance of distinct coordinates under the uniform law."""
    return 1.0 / n, (n - 1) / (n * n * (n + 1)), -1.0 / (n * n * (n + 1))


def moment_check(points) -> MomentReport:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise UsageError("points must form a (count, n) array with n >= 2")
    size, n = pts.shape
    if size < MIN_MOMENT_SIZE:
        raise UsageError(f"moment check needs at least {MIN_MOMENT_SIZE} points, got {size}")
    mean_t, var_t, cov_t = moment_targets(n)
    means = pts.mean(axis=0)
    centred = pts - means
    variances = (centred**2).sum(axis=0) / (size - 1)
    m4 = (centred**4).mean(axis=0)
    var_se = np.sqrt(np.maximum(m4 - variances**2, 0.0) / size)
    prod = centred[:, 0] * centred[:, 1]
    cov = float(prod.sum() / (size - 1))
    cov_se = float(prod.std(ddof=1) / math.sqrt(size))
    return MomentReport(
        n=n,
        size=size,
        means=means,
        mean_se=np.sqrt(variances / size),
        mean_target=mean_t,
        variances=variances,
        variance_se=var_se,
        variance_target=var_t,
        covariance=cov,
        covariance_se=cov_se,
        covariance_target=cov_t,
    )
