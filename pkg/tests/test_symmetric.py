import math

import numpy as np
import pytest

from conftest import random_poly
from torusnorms.norms import lp_norm_exact_even
from torusnorms.polynomial import build, degree_profile, dilate, evaluate_points, power_coefficients, variable
from torusnorms.symmetric import (NEWTON_MAX_K, SteinhausMCSpec, UmnEvaluator, elementary_symmetric,
                                  newton_decompose, power_sum, steinhaus_moment_mc, u_mn)


def test_power_sum():
    P = power_sum(1, 3)
    assert P.terms == build(3, [((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 1)]).terms
    assert power_sum(2, 2).terms == build(2, [((2, 0), 1), ((0, 2), 1)]).terms
    prof = degree_profile(power_sum(4, 5))
    assert prof.max_partial == 4 and prof.homogeneous


def test_elementary_symmetric():
    e = elementary_symmetric(2, 3)
    assert e.terms == build(3, [((1, 1, 0), 1), ((1, 0, 1), 1), ((0, 1, 1), 1)]).terms
    assert len(elementary_symmetric(4, 4).terms) == 1
    assert len(elementary_symmetric(2, 5).terms) == 10
    assert len(elementary_symmetric(3, 6).terms) == 20
    prof = degree_profile(elementary_symmetric(3, 6))
    assert prof.max_partial == 1 and prof.homogeneous and prof.total == 3
    with pytest.raises(ValueError):
        elementary_symmetric(4, 3)


def test_newton_small_cases():
    assert newton_decompose(2).terms == (((0, 1), -1), ((2, 0), 1))
    assert dict(newton_decompose(3).terms) == {(3, 0, 0): 1, (1, 1, 0): -3, (0, 0, 1): 2}
    assert newton_decompose(2).w_terms == (((0, 1), -1),)


@pytest.mark.parametrize("k", range(1, NEWTON_MAX_K + 1))
def test_newton_tuple_constraints(k):
    dec = newton_decompose(k)
    assert dec.residual == 0
    for js, a in dec.terms:
        assert sum((i + 1) * j for i, j in enumerate(js)) == k
        assert a.denominator == 1
    for js, _ in dec.w_terms:
        assert any(js[1:])


@pytest.mark.parametrize("k", range(2, 7))
def test_newton_identity_structural(k):
    dec = newton_decompose(k)
    for n in (k, k + 1, k + 2):
        assert dec.residual_at(n) == 0


def test_newton_range():
    for bad in (0, NEWTON_MAX_K + 1):
        with pytest.raises(ValueError):
            newton_decompose(bad)


def test_u_mn_examples():
    U = u_mn(2, 2)
    assert U.terms == (((1, 1), pytest.approx(1.0)),)
    U = u_mn(3, 5)
    prof = degree_profile(U)
    assert prof.homogeneous and prof.max_partial == 1
    assert all(c == pytest.approx(6 * 5 ** -1.5) for _, c in U.terms)
    with pytest.raises(ValueError):
        u_mn(3, 2)


@pytest.mark.parametrize("n", [1, 4, 16, 100])
def test_u1n_has_unit_l2_norm(n):
    assert lp_norm_exact_even(u_mn(1, n), 2).value == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("n", [2, 3, 10, 50, 128])
def test_u2n_l2_gap_is_two_over_n(n):
    sq = lp_norm_exact_even(u_mn(2, n), 2).value ** 2
    assert sq == pytest.approx(2 * (n - 1) / n, rel=1e-12)
    assert 2 - sq == pytest.approx(2 / n, rel=1e-9)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 5, 8, 12])
def test_power_sum_distribution_identity(k, n):
    Qk = dilate(power_sum(k, n), n ** -0.5)
    Q1 = dilate(power_sum(1, n), n ** -0.5)
    lhs = lp_norm_exact_even(Qk, 4).value
    rhs = n ** (-(k - 1) / 2) * lp_norm_exact_even(Q1, 4).value
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_power_sum_second_moment_decays():
    for n in (4, 16, 64):
        Q = dilate(power_sum(2, n), n ** -0.5)
        assert lp_norm_exact_even(Q, 2).value ** 2 == pytest.approx(1 / n, rel=1e-12)


def test_evaluator_matches_expansion(rng):
    Z = np.exp(2j * np.pi * rng.random((50, 7)))
    for m in (1, 3, 7):
        assert np.allclose(UmnEvaluator(m, 7)(Z), evaluate_points(u_mn(m, 7), Z))


def test_mc_unimodular():
    res = steinhaus_moment_mc(variable(1, 0), 2, SteinhausMCSpec(1000, 3))
    assert res.method == "monte-carlo"
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_mc_u1n_fourth_moment():
    n = 256
    res = steinhaus_moment_mc(UmnEvaluator(1, n), 4, SteinhausMCSpec(20_000, 11), n=n)
    assert abs(res.value - (2 - 1 / n)) <= 3 * res.error_estimate


def _mc_cases():
    rng = np.random.default_rng(99)
    for i in range(20):
        n = 1 + i % 3
        yield i, random_poly(rng, n, 3), 2 * (1 + i % 2)


@pytest.mark.parametrize("case", list(_mc_cases()), ids=lambda c: f"case{c[0]}")
def test_mc_agrees_with_exact_even(case):
    i, P, p = case
    exact = lp_norm_exact_even(P, p).value ** p
    res = steinhaus_moment_mc(P, p, SteinhausMCSpec(10_000, 1000 + i))
    assert abs(res.value - exact) <= 4 * res.error_estimate


def test_mc_deterministic_across_thread_counts(monkeypatch):
    P = u_mn(2, 6)
    spec = SteinhausMCSpec(5000, 5)
    values = []
    for threads in ("1", "3"):
        monkeypatch.setenv("TORUSNORMS_THREADS", threads)
        values.append(steinhaus_moment_mc(P, 3.0, spec))
    assert values[0].value == values[1].value
    assert values[0].error_estimate == values[1].error_estimate


def test_mc_spec_validation():
    with pytest.raises(ValueError):
        SteinhausMCSpec(50, 1)
    with pytest.raises(ValueError):
        SteinhausMCSpec(1000, 1, batch=1)
    with pytest.raises(ValueError):
        steinhaus_moment_mc(UmnEvaluator(1, 3), 2, SteinhausMCSpec(1000, 1))


def test_power_coefficients_agree_with_parseval():
    P = u_mn(2, 9)
    c = power_coefficients(P, 2)
    assert math.sqrt(math.sqrt(np.sum(np.abs(c) ** 2))) == pytest.approx(lp_norm_exact_even(P, 4).value)
