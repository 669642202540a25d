import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mabuchi import kernels
from mabuchi.envelope import (EnvelopeError, HullEnvelope, assemble_boundary, barrier, contact_set,
                              envelope_grid, solve_envelope_hull, solve_envelope_lp)
from mabuchi.expr import parse_expression
from mabuchi.grid import SpaceTimeGrid
from mabuchi.oracles import example3


@pytest.fixture(scope="module")
def ex3_env(unit, ex3_pair):
    b = assemble_boundary(*ex3_pair, unit, SpaceTimeGrid(-1.0, 1.0, 65, 65))
    return b, solve_envelope_hull(b)


def _value_at(b, x, t):
    k = np.flatnonzero((np.abs(b.points[:, 0] - x) < 1e-14) & (np.abs(b.points[:, 1] - t) < 1e-14))
    assert k.size == 1
    return b.values[k[0]]


def test_boundary_samples(ex3_env, unit):
    b, _ = ex3_env
    assert _value_at(b, 0.0, 0.0) == -2.0
    assert np.all(b.values[b.face == 2] == 0.0)
    f = parse_expression("x^2-1")
    b2 = assemble_boundary(f, f, unit, SpaceTimeGrid(-1.0, 1.0, 5, 5))
    assert _value_at(b2, -0.5, 0.0) == pytest.approx(-0.75)


def test_boundary_rejects_nonvanishing(unit):
    with pytest.raises(ValueError):
        assemble_boundary(parse_expression("x^2"), parse_expression("x^2-1"), unit, SpaceTimeGrid(-1, 1, 5, 5))


def test_constant_path(unit):
    f = parse_expression("x^2-1")
    grid = SpaceTimeGrid(-1.0, 1.0, 65, 65)
    u, env = envelope_grid(f, f, unit, grid)
    assert env(0.0, 0.5) == pytest.approx(-1.0, abs=grid.hx**2)
    X, _ = grid.mesh()
    assert np.max(np.abs(u.values - (X**2 - 1))) <= grid.hx**2


def test_known_values(ex3_env):
    _, env = ex3_env
    assert env(0.0, 0.5) == pytest.approx(-1.5, abs=2e-3)
    assert env(-0.9, 0.5) == pytest.approx(-0.36, abs=2e-3)


def test_hull_matches_lp(ex3_env):
    b, env = ex3_env
    rng = np.random.default_rng(7)
    q = np.column_stack([rng.uniform(-1, 1, 100), rng.uniform(0, 1, 100)])
    lp = solve_envelope_lp(b, q)
    np.testing.assert_allclose(env(q[:, 0], q[:, 1]), lp, rtol=0, atol=1e-9)


def test_lp_boundary_and_outside(ex3_env):
    b, _ = ex3_env
    p = b.points[10]
    assert solve_envelope_lp(b, p)[0] == pytest.approx(b.values[10], abs=1e-12)
    with pytest.raises(EnvelopeError):
        solve_envelope_lp(b, [2.0, 0.5])
    with pytest.raises(EnvelopeError):
        ex3_env[1](2.0, 0.5)


def test_envelope_above_oracle_and_converges(unit, ex3_pair):
    errs = []
    for n in (33, 65, 129):
        u, _ = envelope_grid(*ex3_pair, unit, SpaceTimeGrid(-1.0, 1.0, n, n))
        X, T = u.grid.mesh()
        ref, _ = example3(X, T)
        assert np.all(u.values >= ref - 1e-12)
        errs.append(np.max(u.values - ref))
    assert errs[0] > errs[1] > errs[2]


def test_contact_sets(unit, ex3_env):
    f = parse_expression("x^2-1")
    env = solve_envelope_hull(assemble_boundary(f, f, unit, SpaceTimeGrid(-1.0, 1.0, 65, 65)))
    cs = contact_set(env, (0.0, 0.5))
    act = cs.active
    assert set(np.round(act[:, 1], 12)) == {0.0, 1.0}
    assert np.all(np.abs(act[:, 0]) <= 1 / 32 + 1e-12)
    assert cs.weights.sum() == pytest.approx(1.0, abs=1e-15)

    _, env3 = ex3_env
    cs = contact_set(env3, (0.0, 0.5))
    assert np.all(np.abs(np.abs(cs.active[:, 0]) - 1.0) > 1e-12)
    rng = np.random.default_rng(3)
    for x, t in zip(rng.uniform(-1, 1, 20), rng.uniform(0, 1, 20)):
        cs = contact_set(env3, (x, t))
        assert cs.weights.sum() == pytest.approx(1.0, abs=1e-14)
        assert cs.value == pytest.approx(env3(x, t), abs=1e-12)


def test_barrier(unit, ex3_pair):
    b = barrier(*ex3_pair, unit)
    assert b.C == pytest.approx(2.0, abs=1e-12)
    ts = np.linspace(0, 1, 11)
    np.testing.assert_allclose(b.lower(np.ones_like(ts), ts), 0.0, atol=1e-15)
    np.testing.assert_allclose(b.lower(-np.ones_like(ts), ts), 0.0, atol=1e-15)
    f = parse_expression("x^2-1")
    bf = barrier(f, f, unit)
    xs = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(bf.lower(xs, 0 * xs), xs**2 - 1, atol=1e-15)


def test_backends_agree(unit, ex3_pair):
    if kernels.compiled_backend is None:
        pytest.skip("compiled kernel not built")
    b = assemble_boundary(*ex3_pair, unit, SpaceTimeGrid(-1.0, 1.0, 33, 33))
    env_c = solve_envelope_hull(b)
    orig = kernels.pivot, kernels.max_plane
    try:
        kernels.pivot = kernels.python_backend.pivot
        kernels.max_plane = kernels.python_backend.max_plane
        env_p = solve_envelope_hull(b)
        X, T = SpaceTimeGrid(-1.0, 1.0, 41, 41).mesh()
        vp = env_p(X, T)
    finally:
        kernels.pivot, kernels.max_plane = orig
    np.testing.assert_array_equal(env_c.facets, env_p.facets)
    np.testing.assert_array_equal(env_c(X, T), vp)


def test_json_roundtrip(ex3_env):
    _, env = ex3_env
    back = HullEnvelope.from_json(env.to_json())
    X, T = SpaceTimeGrid(-1.0, 1.0, 17, 17).mesh()
    np.testing.assert_array_equal(back(X, T), env(X, T))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(0.5, 4.0))
def test_scaled_pairs_sandwiched(unit, a, c):
    phi0 = parse_expression(f"{a!r}*(x^2-1)")
    phi1 = parse_expression(f"{c!r}*(x^2-1)")
    grid = SpaceTimeGrid(-1.0, 1.0, 17, 17)
    u, _ = envelope_grid(phi0, phi1, unit, grid)
    b = barrier(phi0, phi1, unit)
    X, T = grid.mesh()
    assert np.all(u.values >= b.lower(X, T) - 1e-12)
    assert np.all(u.values <= b.upper(X, T) + 1e-12)
