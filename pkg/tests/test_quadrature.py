import math

import numpy as np
import pytest

from conftest import random_poly
from torusnorms.polynomial import coefficient_functionals, constant, univariate
from torusnorms.quadrature import (LOG, BoxSubset, Power, QuadratureSpec, adaptive_mean, dump_grid, grid_evaluate,
                                   identity, mean_on_box, mean_on_grid)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(4, 8, 1e-6)
    with pytest.raises(ValueError):
        QuadratureSpec(64, 32, 1e-6)
    with pytest.raises(ValueError):
        QuadratureSpec(64, 128, 0)


def test_grid_evaluate_on_univariate():
    vals = grid_evaluate(univariate([1, 1]), [4])
    assert np.allclose(vals, [2, 1 + 1j, 0, 1 - 1j])


def test_mean_of_trig_polynomial_is_exact(z2):
    x, y, one = z2
    P = x * y + 3 * one
    vals = grid_evaluate(P * P, [8, 8])
    assert mean_on_grid(vals) == pytest.approx(9, abs=1e-13)


@pytest.mark.parametrize("n,deg", [(1, 8), (2, 6), (3, 4)])
def test_parseval_matches_quadrature(rng, n, deg):
    P = random_poly(rng, n, deg)
    res = adaptive_mean(P, Power(2), QuadratureSpec(16, 64, 1e-12))
    assert math.sqrt(res.value) == pytest.approx(coefficient_functionals(P)[2], rel=1e-12)


def test_log_mean_of_shifted_linear_factor():
    # log|2 + z| averages to log 2 (Jensen)
    res = adaptive_mean(univariate([2, 1]), LOG)
    assert res.converged and res.value == pytest.approx(math.log(2), abs=1e-12)


def test_box_integral_of_constant_is_measure():
    box = BoxSubset(((0.0, math.pi), (0.0, math.pi / 2)))
    res = mean_on_box(constant(2, 3), identity, box)
    assert box.measure == pytest.approx(1 / 8)
    assert res.value == pytest.approx(3 / 8, rel=1e-14)


def test_box_and_complement_partition_torus(rng):
    P = random_poly(rng, 2, 3)
    box = BoxSubset(((0.3, 2.0), (1.0, 4.0)))
    inside = mean_on_box(P, identity, box, QuadratureSpec(64, 2048, 1e-9)).value
    outside = mean_on_box(P, identity, box.complement(), QuadratureSpec(64, 2048, 1e-9)).value
    whole = adaptive_mean(P, identity, QuadratureSpec(64, 2048, 1e-11)).value
    assert sum(b.measure for b in box.complement()) + box.measure == pytest.approx(1)
    assert inside + outside == pytest.approx(whole, rel=1e-5)


def test_box_rejects_bad_interval():
    with pytest.raises(ValueError):
        BoxSubset(((1.0, 0.5),))


def test_dump_grid_round_trip(tmp_path):
    vals = grid_evaluate(univariate([1, 2, 3]), [16])
    path = tmp_path / "g.bin"
    dump_grid(vals, path)
    assert np.array_equal(np.fromfile(path, dtype=complex), vals)
