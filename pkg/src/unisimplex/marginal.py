"""Conditional marginal laws of one simplex coordinate.

At step ``j`` of the sequential sampler the remaining mass is ``r`` and the
next coordinate ``x`` lives on ``[0, r]`` with

    pdf(x) = k (r - x)**(k - 1) / r**k
    cdf(x) = 1 - ((r - x) / r)**k
    inv(u) = r (1 - (1 - u)**(1/k))

The shape exponent ``k`` depends on the model:

* ``CORRECTED``: ``k = n - j``. The free coordinates after ``x`` span a
  scaled copy of the simplex of dimension ``n - j - 1``, whose volume grows as
  ``(r - x)**(n - j - 1)``.
* ``PAPER_LITERAL``: ``k = n - 1`` at every step, as in the published inverse
  formula. Kept as a known-wrong reference for the statistical harness.

The two coincide at ``j = 1`` and whenever ``n = 2``.
"""

from __future__ import annotations

import enum
import math

__all__ = [
    "DomainError",
    "MarginalModel",
    "shape_exponent",
    "marginal_pdf",
    "marginal_cdf",
    "inverse_cdf",
    "inverse_unit",
    "cdf_unit",
]


class DomainError(ValueError):
    """An argument lies outside the domain of a marginal or sampler operation."""


class MarginalModel(enum.Enum):
    CORRECTED = "corrected"
    PAPER_LITERAL = "paper-literal"

    @property
    def literal(self) -> bool:
        return self is MarginalModel.PAPER_LITERAL


def _check_step(n: int, j: int, r: float) -> None:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not 1 <= j <= n - 1:
        raise DomainError(f"step j must satisfy 1 <= j <= n-1 = {n - 1}, got {j}")
    if not 0.0 < r <= 1.0:
        raise DomainError(f"remaining mass r must satisfy 0 < r <= 1, got {r}")


def _check_x(x: float, r: float) -> None:
    if not 0.0 <= x <= r:
        raise DomainError(f"x must satisfy 0 <= x <= r = {r}, got {x}")


def shape_exponent(model: MarginalModel, n: int, j: int) -> int:
    """CDF exponent ``k`` used at step ``j`` of an ``n``-coordinate draw."""
    return n - 1 if model is MarginalModel.PAPER_LITERAL else n - j


def inverse_unit(u: float, k: int) -> float:
    """``1 - (1 - u)**(1/k)`` for the unit interval.

    Evaluated as ``-expm1(log(1 - u) / k)``, which keeps full relative
    precision for small ``u`` provided ``1 - u`` is exact. That holds for
    every value a :class:`UniformSource` emits (they lie on the 2**-53 grid)
    and makes the cheap ``log`` usable; other inputs fall back to log1p.
    ``k == 1`` skips the power.
    """
    if k == 1:
        return u
    w = 1.0 - u
    lg = math.log(w) if 1.0 - w == u else math.log1p(-u)
    return -math.expm1(lg / k)


def cdf_unit(t: float, k: int) -> float:
    """``1 - (1 - t)**k`` for ``t`` in [0, 1]; inverse of :func:`inverse_unit`."""
    if k == 1:
        return t
    if t >= 1.0:
        return 1.0
    return -math.expm1(k * math.log1p(-t))


def marginal_pdf(model: MarginalModel, n: int, j: int, r: float, x: float) -> float:
    """Density of coordinate ``j`` on ``[0, r]``."""
    _check_step(n, j, r)
    _check_x(x, r)
    k = shape_exponent(model, n, j)
    if k == 1:
        return 1.0 / r
    return k * ((r - x) / r) ** (k - 1) / r


def marginal_cdf(model: MarginalModel, n: int, j: int, r: float, x: float) -> float:
    """Cumulative distribution of coordinate ``j``; exactly 0 at 0 and 1 at ``r``."""
    _check_step(n, j, r)
    _check_x(x, r)
    if x == r:
        return 1.0
    return cdf_unit(x / r, shape_exponent(model, n, j))


def inverse_cdf(model: MarginalModel, n: int, j: int, r: float, u: float) -> float:
    """Quantile of coordinate ``j``: maps ``u`` in [0, 1) to ``[0, r]``."""
    _check_step(n, j, r)
    if not 0.0 <= u < 1.0:
        raise DomainError(f"u must satisfy 0 <= u < 1, got {u}")
    return r * inverse_unit(u, shape_exponent(model, n, j))
