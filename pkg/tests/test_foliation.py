import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from mabuchi.envelope import envelope_grid
from mabuchi.expr import parse_expression
from mabuchi.foliation import (NotInImage, NotSmoothlyConnectable, eta_from_xi, jacobian_det, newton_xi,
                               smooth_geodesic, space_hessian)
from mabuchi.grid import SpaceTimeGrid


@pytest.fixture(scope="module")
def derived_geo(derived_pair, unit):
    return smooth_geodesic(*derived_pair, unit, SpaceTimeGrid(-1.0, 1.0, 65, 65))


def test_eta(ex3_pair):
    f = parse_expression("x^2-1")
    assert eta_from_xi(f, f, 0.37) == pytest.approx(0.37, abs=1e-15)
    assert eta_from_xi(*ex3_pair, 0.3) == pytest.approx(0.6, abs=1e-14)
    with pytest.raises(NotInImage):
        eta_from_xi(*ex3_pair, 0.6)


def test_newton_trivial_cases(derived_pair):
    f = parse_expression("x^2-1")
    assert newton_xi(f, f, 0.3, 0.7) == pytest.approx(0.3, abs=1e-15)
    assert newton_xi(*derived_pair, 0.45, 0.0) == 0.45


def test_newton_against_bisection(derived_pair):
    phi, psi = derived_pair
    xi = newton_xi(phi, psi, 0.4, 0.5)

    def F(s):
        return 0.5 * s + 0.5 * eta_from_xi(phi, psi, s) - 0.4

    ref = brentq(F, -1.0, 1.0, xtol=1e-15)
    assert xi == pytest.approx(ref, abs=1e-12)
    assert abs(F(xi)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 1))
def test_segment_identity(x, t):
    phi, psi = parse_expression("x^2-1"), parse_expression("x^2-1+0.1*(1-x^2)^2")
    xi = newton_xi(phi, psi, x, t)
    eta = eta_from_xi(phi, psi, xi)
    assert (1 - t) * xi + t * eta == pytest.approx(x, abs=1e-12)
    assert phi.diff("x")(xi) == pytest.approx(psi.diff("x")(eta), abs=1e-10)


def test_jacobian(ex3_pair, derived_pair):
    assert jacobian_det(*ex3_pair, 0.1, 0.5) == pytest.approx(1.5)
    assert jacobian_det(*derived_pair, 0.2, 0.0) == 1.0
    f = parse_expression("x^2-1")
    np.testing.assert_allclose(jacobian_det(f, f, np.linspace(-1, 1, 9), 0.8), 1.0, atol=1e-15)


def test_constant_path(unit):
    f = parse_expression("x^2-1")
    g = smooth_geodesic(f, f, unit, SpaceTimeGrid(-1.0, 1.0, 17, 17))
    X, _ = g.field.grid.mesh()
    np.testing.assert_allclose(g.field.values, X**2 - 1, atol=1e-15)
    np.testing.assert_allclose(g.foliation.xi, X, atol=1e-15)
    assert space_hessian(g, 0.3, 0.4) == pytest.approx(2.0)


def test_not_connectable(ex3_pair, unit):
    with pytest.raises(NotSmoothlyConnectable, match=r"\(-4,4\) vs \(-2,2\)"):
        smooth_geodesic(*ex3_pair, unit, SpaceTimeGrid(-1.0, 1.0, 9, 9))


def test_invariants(derived_geo):
    fol = derived_geo.foliation
    assert np.max(fol.residual) <= 1e-12
    assert np.max(fol.gradient_mismatch) <= 1e-10
    assert derived_geo.min_space_hessian > 0
    X, T = derived_geo.field.grid.mesh()
    np.testing.assert_allclose((1 - T) * fol.xi + T * fol.eta, X, atol=1e-12)


def test_space_hessian_vs_differences(derived_pair, unit):
    grid = SpaceTimeGrid(-1.0, 1.0, 129, 129)
    g = smooth_geodesic(*derived_pair, unit, grid)
    h = 1e-3
    u = g.evaluate(np.array([0.4 - h, 0.4, 0.4 + h]), 0.5)
    fd = (u[0] - 2 * u[1] + u[2]) / h**2
    main, cross = space_hessian(g, 0.4, 0.5, return_cross=True)
    assert main == pytest.approx(fd, abs=1e-5)
    assert abs(cross) <= 1e-12
    j = int(np.argmin(np.abs(grid.t - 0.5)))
    i = int(np.argmin(np.abs(grid.x - 0.4)))
    U = g.field.values
    grid_fd = (U[j, i + 1] - 2 * U[j, i] + U[j, i - 1]) / grid.hx**2
    assert space_hessian(g, grid.x[i], 0.5) == pytest.approx(grid_fd, abs=grid.hx**2)
    assert space_hessian(g, 0.4, 0.5, T=2.0) == pytest.approx(4 * main)


def test_linear_along_segments(derived_geo):
    xi, eta = derived_geo.segment(0.25, 0.6)
    ts = np.linspace(0, 1, 7)
    xs = (1 - ts) * xi + ts * eta
    us = derived_geo.evaluate(xs, ts)
    line = (1 - ts) * derived_geo.phi(xi) + ts * derived_geo.psi(eta)
    np.testing.assert_allclose(us, line, atol=1e-12)


def test_matches_envelope(derived_pair, unit):
    grid = SpaceTimeGrid(-1.0, 1.0, 65, 65)
    g = smooth_geodesic(*derived_pair, unit, grid)
    u, _ = envelope_grid(*derived_pair, unit, grid)
    assert np.max(np.abs(g.field.values - u.values)) <= 2e-3


def test_foliation_json(derived_geo, tmp_path):
    p = tmp_path / "fol.json"
    derived_geo.foliation.to_json(p)
    data = json.loads(p.read_text())
    assert data["grid"] == {"nx": 65, "nt": 65}
    assert len(data["nodes"]) == 65 * 65
    assert set(data["nodes"][0]) == {"x", "t", "xi", "eta", "iters", "residual"}
