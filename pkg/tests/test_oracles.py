import math

import numpy as np
import pytest

from mabuchi.oracles import (DomainError, EXAMPLE4, LOG2, example3, example3_hessian, example3_hessian_printed,
                             example3_interface_gradients, example4, example4_hessian_printed,
                             example4_interface, oracle_grid)


def test_example3_values():
    xs = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(example3(xs, 0 * xs)[0], 2 * (xs**2 - 1), atol=1e-15)
    np.testing.assert_allclose(example3(xs, 0 * xs + 1)[0], xs**2 - 1, atol=1e-15)
    assert example3(-0.5, 0.0)[0] == pytest.approx(-1.5)
    assert example3(0.0, 0.5) == (pytest.approx(-1.5), 2)
    with pytest.raises(DomainError):
        example3(1.5, 0.5)


def test_example3_hessians():
    assert example3_hessian_printed(0.0, 1.0, 2)[0, 0] == pytest.approx(2.0)
    x = np.linspace(-0.99, -0.6, 20)
    t = np.full_like(x, 0.1)
    H = example3_hessian_printed(x, t, 1)
    np.testing.assert_allclose(np.linalg.det(H), 0.0, atol=1e-9)
    ts = np.array([0.9, 0.99, 0.999])
    h11 = example3_hessian_printed(-1.0 + 0 * ts, ts, 1)[..., 0, 0]
    np.testing.assert_allclose(h11 * (1 - ts), 4.0)
    Hs, _ = example3_hessian(-0.95, 0.2, 1)
    np.testing.assert_allclose(Hs, example3_hessian_printed(-0.95, 0.2, 1), rtol=1e-12)


def test_example3_interfaces():
    data = example3_interface_gradients()
    for key, printed in (("1|2", (-2.0, 0.5)), ("2|3", (2.0, 0.5))):
        d = data[key]
        np.testing.assert_allclose(d["value_a"], d["printed_value"], atol=1e-12)
        np.testing.assert_allclose(d["value_b"], d["printed_value"], atol=1e-12)
        np.testing.assert_allclose(d["grad_a"], np.broadcast_to(printed, d["grad_a"].shape), atol=1e-12)
        np.testing.assert_allclose(d["grad_b"], np.broadcast_to(printed, d["grad_b"].shape), atol=1e-12)


def test_example4_values():
    ts = np.linspace(0, 1, 11)
    v, _ = example4(example4_interface(ts), ts)
    np.testing.assert_allclose(v, ts - 1, atol=1e-12)
    assert example4(example4_interface(0.5), 0.5)[0] == pytest.approx(-0.5)
    xs = np.linspace(example4_interface(0.0), 0, 7)
    np.testing.assert_allclose(example4(xs, 0 * xs)[0], 2 * (np.exp(2 * xs) - 1), atol=1e-14)
    assert example4(-4.0, 0.5)[0] == pytest.approx(2 * math.exp(-8 - 0.5 * LOG2) + 0.5 - 2, rel=1e-14)
    with pytest.raises(DomainError):
        example4(0.5, 0.5)


def test_example4_hessian_det():
    x, t = np.linspace(-3, -0.5, 9), np.linspace(0, 0.9, 9)
    for r in (1, 2):
        H = example4_hessian_printed(x, t, r)
        D = np.linalg.det(H) / (1 + np.sum(H**2, axis=(-1, -2)))
        np.testing.assert_allclose(D, 0, atol=1e-12)
    H = EXAMPLE4.pieces[1].hessian()
    assert float(H[0][0](-0.2, 0.3)) == pytest.approx(example4_hessian_printed(-0.2, 0.3, 2)[0, 0], rel=1e-12)


def test_oracle_grid():
    u = oracle_grid("example3", 65, 65)
    assert u.values[0, 32] == -2.0
    assert set(np.unique(u.region)) == {1, 2, 3}
    v = oracle_grid("example4", 33, 17, -4.0)
    assert v.grid.a == -4.0 and v.grid.b == 0.0
    with pytest.raises(ValueError):
        oracle_grid("example5", 9, 9)


def test_example4_curvature_near_corner():
    tau = np.array([1e-1, 1e-2, 1e-3])
    fixed = example4_hessian_printed(-0.5 + 0 * tau, 1 - tau, 2)[..., 0, 0]
    assert np.all(np.diff(fixed) < 0) and fixed[-1] < 1e-100
    along = example4_hessian_printed(-0.25 * tau, 1 - tau, 2)[..., 0, 0]
    np.testing.assert_allclose(along * tau, 8 * math.exp(-0.5), rtol=1e-12)


def test_example4_interface_gradient():
    ts = np.linspace(0, 0.95, 20)
    xs = example4_interface(ts)
    printed_tx = (1 - LOG2, 2.0)  # displayed in (t, x) order
    for piece in EXAMPLE4.pieces:
        gx, gt = (np.asarray(d(xs, ts), float) * np.ones_like(ts) for d in piece.gradient())
        np.testing.assert_allclose(gx, printed_tx[1], atol=1e-12)
        np.testing.assert_allclose(gt, printed_tx[0], atol=1e-12)
