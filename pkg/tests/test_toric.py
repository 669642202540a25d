import cmath
import math

import numpy as np
import pytest

from mabuchi.expr import to_text
from mabuchi.grid import GridField, SpaceTimeGrid
from mabuchi.oracles import EXAMPLE4, example4_interface, oracle_grid
from mabuchi.toric import (AxisSetError, NonToricError, ToricProblem, complex_hessian, complex_hessian_from_log,
                           exp_pushforward, log_pullback, sample_bidisc_annulus, toric_psh_check)


@pytest.mark.parametrize("radial,expected", [
    ("2*|w|^2/exp(log(2)*log(|z|))+log(|z|)-2", "2*exp(2*x)/exp(log(2)*t)+t-2"),
    ("|w|^2-1", "exp(2*x)-1"),
    ("2*(1-log(|z|))*(exp(log(|w|^2)/(1-log(|z|)))-1)", "2*(1-t)*(exp(2*x/(1-t))-1)"),
])
def test_log_pullback(radial, expected):
    v = log_pullback(radial)
    assert to_text(v.ast) == expected


def test_log_pullback_values():
    v = log_pullback("2*|w|^2/exp(log(2)*log(|z|))+log(|z|)-2")
    x, t = -0.7, 0.4
    assert v(x, t) == pytest.approx(float(EXAMPLE4.pieces[0](x, t)), rel=1e-14)
    assert exp_pushforward(v, math.exp(x), math.exp(t)) == pytest.approx(v(x, t))


@pytest.mark.parametrize("bad", ["w^2", "|w|^2+z", "x+|w|"])
def test_non_toric_rejected(bad):
    with pytest.raises(NonToricError):
        log_pullback(bad)


def test_psh_example4():
    v = oracle_grid("example4", 257, 257)
    rep = toric_psh_check(v, example4_interface)
    assert rep.convex
    assert rep.max_normalized_det < 1e-4


def test_psh_simple_fields():
    g = SpaceTimeGrid(-4.0, 0.0, 65, 65)
    rep = toric_psh_check(GridField.from_function(g, lambda x, t: np.exp(2 * x) - 1))
    assert rep.passed and rep.max_normalized_det <= 1e-12
    rep = toric_psh_check(GridField.from_function(g, lambda x, t: -x * x))
    assert not rep.convex


def test_complex_hessian_points():
    s = complex_hessian(0.1, cmath.exp(0.5), region=1)
    assert abs(s.det) <= 1e-15
    s = complex_hessian(0.05, 1.0 + 1e-12, region=1)
    assert s.matrix[1, 1].real == pytest.approx(2.0, rel=1e-9)
    assert s.hermitian_defect <= 1e-15
    with pytest.raises(AxisSetError):
        complex_hessian(0.0, 1.5)


@pytest.mark.parametrize("region", [1, 2])
def test_complex_hessian_random(region):
    for w, z in sample_bidisc_annulus(100, region, seed=region):
        s = complex_hessian(w, z)
        assert s.region == region
        assert abs(s.det) <= 1e-12
        assert s.min_eigenvalue >= -1e-12
        M = complex_hessian_from_log(EXAMPLE4.pieces[region - 1], w, z)
        np.testing.assert_allclose(M, s.matrix, rtol=1e-12, atol=1e-14)


def test_problem_solve():
    prob = ToricProblem.from_json('{"phi0": "2*(exp(2*x)-1)", "phi1": "exp(2*x)-1", "truncation": -4}')
    u = prob.solve(65, 65)
    ref = oracle_grid("example4", 65, 65)
    assert np.max(np.abs(u.values - ref.values)) <= 5e-3
    assert np.all(u.values >= ref.values - 1e-3)
    with pytest.raises(ValueError):
        ToricProblem(prob.phi0, prob.phi1, truncation=1.0)
