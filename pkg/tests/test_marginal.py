import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from unisimplex import DomainError, MarginalModel, inverse_cdf, marginal_cdf, marginal_pdf, shape_exponent
from unisimplex.marginal import cdf_unit, inverse_unit

C = MarginalModel.CORRECTED
L = MarginalModel.PAPER_LITERAL


# -- worked values -----------------------------------------------------------


@pytest.mark.parametrize(
    "model, n, j, r, x, expected",
    [
        (C, 3, 1, 1.0, 0.0, 2.0),
        (C, 2, 1, 1.0, 0.7, 1.0),
        (C, 4, 2, 0.5, 0.25, 2.0),
        (L, 4, 2, 0.5, 0.25, 1.5),
    ],
)
def test_pdf_values(model, n, j, r, x, expected):
    assert marginal_pdf(model, n, j, r, x) == pytest.approx(expected, rel=1e-15)


def test_literal_pdf_matches_direct_arithmetic():
    # (n-1)(r-x)^(n-2)/r^(n-1) with n=4, r=0.5, x=0.25 is 0.1875/0.125
    assert marginal_pdf(L, 4, 2, 0.5, 0.25) == 3 * 0.25**2 / 0.5**3 == 1.5


def test_exponent_zero_density_is_constant():
    for x in (0.0, 0.1, 0.3):
        assert marginal_pdf(C, 5, 4, 0.3, x) == pytest.approx(1 / 0.3)


def test_cdf_values():
    assert marginal_cdf(C, 3, 1, 1.0, 0.5) == pytest.approx(0.75, rel=1e-15)


@pytest.mark.parametrize("model", list(MarginalModel))
@pytest.mark.parametrize("n, j, r", [(2, 1, 1.0), (5, 3, 0.4), (30, 29, 1e-3), (7, 1, 0.9)])
def test_cdf_exact_endpoints(model, n, j, r):
    assert marginal_cdf(model, n, j, r, 0.0) == 0.0
    assert marginal_cdf(model, n, j, r, r) == 1.0
    assert inverse_cdf(model, n, j, r, 0.0) == 0.0


def test_inverse_values():
    assert inverse_cdf(C, 3, 1, 1.0, 0.75) == pytest.approx(0.5, rel=1e-15)
    assert inverse_cdf(C, 3, 2, 0.4, 0.25) == pytest.approx(0.1, rel=1e-15)


def test_final_step_is_plain_rescale():
    for u in (0.0, 0.123, 0.999):
        assert inverse_cdf(C, 6, 5, 0.37, u) == 0.37 * u


def test_shape_exponents():
    assert [shape_exponent(C, 6, j) for j in range(1, 6)] == [5, 4, 3, 2, 1]
    assert [shape_exponent(L, 6, j) for j in range(1, 6)] == [5] * 5


# -- oracles -------------------------------------------------------------------


def test_normalization_by_quadrature():
    for model in MarginalModel:
        for n in range(2, 21):
            for j in range(1, n):
                for r in (1.0, 0.5, 0.01):
                    total, _ = quad(lambda x: marginal_pdf(model, n, j, r, x), 0.0, r, epsabs=1e-13, epsrel=1e-13)
                    assert total == pytest.approx(1.0, abs=1e-9), (model, n, j, r)


@pytest.mark.parametrize("model", list(MarginalModel))
@pytest.mark.parametrize("n, j, r", [(3, 1, 1.0), (6, 2, 0.7), (12, 8, 0.2), (20, 3, 0.01)])
def test_pdf_is_derivative_of_cdf(model, n, j, r):
    h = r * 1e-6
    peak = marginal_pdf(model, n, j, r, 0.0)
    for t in np.linspace(0.05, 0.95, 13):
        x = t * r
        fd = (marginal_cdf(model, n, j, r, x + h) - marginal_cdf(model, n, j, r, x - h)) / (2 * h)
        assert fd == pytest.approx(marginal_pdf(model, n, j, r, x), rel=1e-5, abs=1e-7 * peak)


def test_cdf_matches_closed_form_power():
    rng = random.Random(5)
    for _ in range(500):
        n = rng.randint(2, 40)
        j = rng.randint(1, n - 1)
        r = rng.uniform(0.01, 1.0)
        x = rng.uniform(0, r)
        assert marginal_cdf(C, n, j, r, x) == pytest.approx(1 - ((r - x) / r) ** (n - j), abs=1e-13)
        assert marginal_cdf(L, n, j, r, x) == pytest.approx(1 - ((r - x) / r) ** (n - 1), abs=1e-13)


def test_inverse_unit_relative_accuracy_against_mpmath():
    mpmath.mp.dps = 40
    rng = np.random.default_rng(0)
    us = np.concatenate([10.0 ** rng.uniform(-15, 0, 2000), rng.random(2000)])
    on_grid = np.floor(us * 2.0**53) / 2.0**53
    us = np.concatenate([on_grid[on_grid > 0], us])  # grid values take the log path, others log1p
    worst = 0.0
    for u in us:
        for k in (2, 3, 17, 1000):
            exact = 1 - (1 - mpmath.mpf(u)) ** (mpmath.mpf(1) / k)
            got = inverse_unit(float(u), k)
            worst = max(worst, float(abs((got - exact) / exact)))
    assert worst < 4 * 2.0**-52


def test_round_trip_random_tuples():
    rng = random.Random(11)
    for model in MarginalModel:
        for _ in range(1000):
            n = rng.randint(2, 200)
            j = rng.randint(1, n - 1)
            r = rng.choice([1.0, rng.uniform(1e-6, 1.0)])
            u = rng.random()
            x = inverse_cdf(model, n, j, r, u)
            assert 0.0 <= x <= r
            assert abs(marginal_cdf(model, n, j, r, x) - u) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(
    model=st.sampled_from(list(MarginalModel)),
    n=st.integers(2, 5000),
    data=st.data(),
    r=st.floats(1e-9, 1.0),
    u=st.floats(0.0, 1.0, exclude_max=True),
)
def test_round_trip_property(model, n, data, r, u):
    j = data.draw(st.integers(1, n - 1))
    x = inverse_cdf(model, n, j, r, u)
    assert 0.0 <= x <= r
    assert abs(marginal_cdf(model, n, j, r, x) - u) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 500), data=st.data(), r=st.floats(1e-6, 1.0))
def test_cdf_monotone(n, data, r):
    j = data.draw(st.integers(1, n - 1))
    xs = sorted(data.draw(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=20)))
    vals = [marginal_cdf(C, n, j, r, x * r) for x in xs]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_modes_agree_bitwise_where_exponents_coincide():
    rng = random.Random(3)
    for _ in range(500):
        u = rng.random()
        r = rng.uniform(1e-3, 1.0)
        n = rng.randint(2, 300)
        assert inverse_cdf(C, n, 1, r, u) == inverse_cdf(L, n, 1, r, u)
        assert inverse_cdf(C, 2, 1, r, u) == inverse_cdf(L, 2, 1, r, u)


def test_modes_differ_after_first_step():
    assert inverse_cdf(C, 4, 2, 0.5, 0.5) != inverse_cdf(L, 4, 2, 0.5, 0.5)


def test_unit_helpers_are_inverse():
    for k in (1, 2, 9):
        for u in (0.0, 1e-12, 0.3, 0.999999):
            assert cdf_unit(inverse_unit(u, k), k) == pytest.approx(u, rel=1e-13, abs=1e-300)


# -- domain errors ------------------------------------------------------------


@pytest.mark.parametrize(
    "args, fragment",
    [
        ((1, 1, 1.0, 0.0), "n must be"),
        ((3, 0, 1.0, 0.0), "step j"),
        ((3, 3, 1.0, 0.0), "step j"),
        ((3, 1, 0.0, 0.0), "remaining mass"),
        ((3, 1, 1.5, 0.0), "remaining mass"),
        ((3, 1, 0.5, 0.6), "x must"),
        ((3, 1, 0.5, -0.1), "x must"),
    ],
)
def test_pdf_cdf_domain_errors(args, fragment):
    for fn in (marginal_pdf, marginal_cdf):
        with pytest.raises(DomainError, match=fragment):
            fn(C, *args)


@pytest.mark.parametrize("u", [1.0, -0.1, math.nan])
def test_inverse_rejects_u_outside_half_open_interval(u):
    with pytest.raises(DomainError, match="u must"):
        inverse_cdf(C, 3, 1, 1.0, u)
