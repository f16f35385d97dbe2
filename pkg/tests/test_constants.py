import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusnorms import constants as K


def test_gamma_examples():
    assert K.gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert K.gamma_fn(5) == pytest.approx(24.0, rel=1e-14)
    with pytest.raises(ValueError):
        K.gamma_fn(0.0)
    with pytest.raises(OverflowError):
        K.gamma_fn(172.0)
    assert K.log_gamma(200.0) == pytest.approx(math.lgamma(200.0))


@pytest.mark.parametrize("bracket", [(1.0, 2.0), (0.5, 3.0)])
def test_gamma_minimum(bracket):
    assert K.gamma_minimum(*bracket) == pytest.approx(1.4616321451, abs=1e-8)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("m", range(11))
def test_lambda_dual_forms_agree(p, m):
    L = K.arestov_lambda(p, m)
    assert L.consistency_gap < 1e-8
    assert L.value >= 1.0


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0])
def test_lambda_at_zero_and_monotone(p):
    vals = [K.arestov_lambda(p, m).value for m in range(12)]
    assert vals[0] == pytest.approx(1.0, rel=1e-14)
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_lambda_examples():
    assert K.arestov_lambda(2, 1).value == pytest.approx(math.sqrt(2), rel=1e-13)
    assert K.arestov_lambda(2, 2).value == pytest.approx(math.sqrt(6), rel=1e-13)
    assert K.arestov_lambda(1, 2).value == pytest.approx(2.0, rel=1e-13)
    L = K.arestov_lambda(1, 1)
    assert L.value_gamma_form == pytest.approx(4 / math.pi, rel=1e-13)
    assert L.value_integral_form == pytest.approx(4 / math.pi, rel=1e-10)


def test_lambda_large_mp_stays_finite():
    L = K.arestov_lambda(3.0, 400)
    assert math.isfinite(L.value) and L.consistency_gap < 1e-8


def test_lambda_domain():
    with pytest.raises(ValueError):
        K.arestov_lambda(0, 2)
    with pytest.raises(ValueError):
        K.arestov_lambda(1, -1)


@pytest.mark.parametrize("m", range(16))
def test_central_binomial_identity(m):
    assert K.lambda_two_squared(m) == math.comb(2 * m, m)
    assert K.arestov_lambda(2, m).value ** 2 == pytest.approx(math.comb(2 * m, m), rel=1e-12)


@pytest.mark.parametrize("p,m", [(2, 100), (1, 200)])
def test_lambda_asymptotic(p, m):
    ratio = K.arestov_lambda(p, m).value / K.arestov_lambda_asymptotic(p, m)
    assert ratio == pytest.approx(1.0, abs=0.01)


def test_asymptotic_over_power_of_two_decreases():
    r = [K.arestov_lambda_asymptotic(1.5, m) / 2 ** m for m in range(2, 60)]
    assert all(a > b for a, b in zip(r, r[1:]))


def test_eq1_examples():
    lhs, rhs, ok = K.eq1_bound_check(1, 1)
    assert (lhs, rhs, ok) == (pytest.approx(4 / math.pi), 2.0, True)
    lhs, rhs, ok = K.eq1_bound_check(3, 1)
    assert lhs == pytest.approx(8 * (2 / math.pi) ** 3, rel=1e-12) and rhs == 8 and ok
    assert K.eq1_bound_check(5, 2)[2]


def test_eq1_grid():
    assert all(K.eq1_bound_check(m, k)[2] for m in range(1, 11) for k in range(1, 11))


def test_kwapien_examples():
    b = K.kwapien_lower_bound(2, 4, 1)
    assert b.value == pytest.approx(2 ** 0.25, rel=1e-13)
    for m in range(1, 51):
        assert K.kwapien_lower_bound(2, 4, m).value <= 2 ** (m / 2)
    ratios = [K.kwapien_lower_bound(2, 4, m).ratio for m in range(20, 201)]
    assert max(ratios) / min(ratios) < 1.05
    with pytest.raises(ValueError):
        K.kwapien_lower_bound(4, 2, 3)


@pytest.mark.parametrize("p,q,m", [(1, 2, 7), (0.5, 3, 12), (1.5, 2.5, 40), (2, 8, 30)])
def test_kwapien_chain(p, q, m):
    assert K.kwapien_lower_bound(p, q, m).value <= (q / p) ** (m / 2)


def test_comparison_constants():
    assert K.comparison_constants(1, 2) == pytest.approx((math.sqrt(2), math.sqrt(2)))
    assert K.comparison_constants(2, 4) == pytest.approx((math.sqrt(2), math.sqrt(2)))
    assert K.comparison_constants(0.5, 3) == pytest.approx((math.sqrt(6), math.sqrt(6)))
    b, u = K.comparison_constants(3, 5)
    assert b <= u
    with pytest.raises(ValueError):
        K.comparison_constants(2, 2)


def test_stirling_examples():
    lo, hi = K.stirling_bracket(1)
    assert lo == pytest.approx(0.92214, abs=1e-5) and hi == pytest.approx(1.00227, abs=1e-5)
    lo, hi = K.stirling_bracket(10)
    assert lo < 3628800 < hi
    for x in range(1, 51):
        lo, hi = K.stirling_bracket(x)
        assert (hi - lo) / math.gamma(x + 1) <= math.expm1(1 / (12 * x))


def test_stirling_brackets_random_points():
    xs = np.random.default_rng(7).uniform(0, 60, 200)
    for x in xs:
        lo, hi = K.stirling_bracket(float(x))
        g = K.gamma_fn(float(x) + 1)
        assert lo < g < hi


def test_interpolation_constant():
    assert K.interpolation_constant(0.5) == pytest.approx(2.0, rel=1e-14)
    assert K.interpolation_constant(1.0) == 1.0
    grid = np.linspace(0.01, 0.99, 99)
    vals = [1 / K.interpolation_constant(t) for t in grid]
    assert grid[int(np.argmin(vals))] == pytest.approx(0.5)
    assert min(vals) == pytest.approx(0.5)
    for bad in (0.0, 1.5, -0.2):
        with pytest.raises(ValueError):
            K.interpolation_constant(bad)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1.0))
def test_interpolation_constant_range(theta):
    assert 1.0 <= K.interpolation_constant(theta) <= 2.0 + 1e-12
