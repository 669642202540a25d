import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mabuchi.envelope import barrier
from mabuchi.expr import parse_expression
from mabuchi.grid import GridField, SpaceTimeGrid
from mabuchi.oracles import EXAMPLE3, EXAMPLE4, example4_interface, oracle_grid
from mabuchi.verify import (CheckRegion, barrier_check, blowup_probe, c11_seminorm, convexity_check, energy,
                            energy_value, gluing_check, lipschitz_constant, ma_residual, quadratic_growth_check,
                            run_checks)

G = SpaceTimeGrid(-1.0, 1.0, 33, 33)
R = CheckRegion(radius=0.2)


def field(fn, g=G):
    return GridField.from_function(g, fn)


@pytest.fixture(scope="module")
def ex3_129():
    return oracle_grid("example3", 129, 129)


def test_ma_residual():
    r = ma_residual(field(lambda x, t: x * x + t * t))
    assert r.details["max_raw"] == pytest.approx(4.0)
    assert r.measured == pytest.approx(4 / 9)
    assert r.status == "fail"
    r = ma_residual(field(lambda x, t: 2 * x - 3 * t + 1))
    assert r.measured == 0.0 and r.status == "pass"


def test_ma_residual_oracle(ex3_129):
    r = ma_residual(ex3_129, R)
    assert r.passed and r.measured < 0.1 * ex3_129.grid.h


def test_convexity(ex3_129):
    assert convexity_check(ex3_129).passed
    assert not convexity_check(field(lambda x, t: -x * x)).passed
    r = convexity_check(field(lambda x, t: x - t))
    assert r.passed and r.measured == pytest.approx(0.0, abs=1e-12)


def test_barrier_check(ex3_129, unit, ex3_pair):
    b = barrier(*ex3_pair, unit)
    r = barrier_check(ex3_129, b)
    assert r.passed and r.details["C"] == 2.0
    assert barrier_check(ex3_129).passed
    j = 64  # t = 0.5
    i = 64  # x = 0
    assert b.upper(0.0, 0.5) == pytest.approx(ex3_129.values[j, i], abs=1e-15)
    bad = GridField(ex3_129.grid, ex3_129.values + 0.5)
    assert not barrier_check(bad, b).passed


def test_lipschitz(ex3_129):
    assert lipschitz_constant(ex3_129).measured == pytest.approx(4.0, abs=0.05)
    assert lipschitz_constant(field(lambda x, t: 0.5 * x - 3 * t)).measured == pytest.approx(3.0)
    assert lipschitz_constant(field(lambda x, t: x * x - 1 + 0 * t)).measured == pytest.approx(2.0, abs=0.1)


def test_c11(ex3_129):
    r = c11_seminorm(ex3_129, R)
    bound = 4 / (1 - (1 - 0.2))  # largest printed entry on the excluded region, up to the diagonal stencil
    assert np.isfinite(r.measured) and r.measured <= 1.5 * bound
    assert c11_seminorm(field(lambda x, t: x * x + t * t)).measured == pytest.approx(2.0)
    assert c11_seminorm(field(lambda x, t: x + t)).measured == pytest.approx(0.0, abs=1e-9)


def test_blowup_probe():
    u = oracle_grid("example3", 257, 257)
    r = blowup_probe(u, (-1.0, 1.0), (0.4, 0.2))
    assert 1.6 <= r.details["ratios"][0] <= 2.4
    c = field(lambda x, t: x * x - 1 + 0 * t, SpaceTimeGrid(-1.0, 1.0, 257, 257))
    assert blowup_probe(c, (-1.0, 1.0), (0.4, 0.2), expect="bounded").passed
    with pytest.raises(ValueError):
        blowup_probe(u, (-1.0, 1.0), (0.4, 0.01))


def test_gluing():
    t = np.linspace(0, 0.95, 50)
    assert gluing_check(EXAMPLE3.pieces[0], EXAMPLE3.pieces[1], -(1 + t) / 2, t).passed
    assert gluing_check(EXAMPLE3.pieces[1], EXAMPLE3.pieces[2], (1 + t) / 2, t).passed
    r = gluing_check(EXAMPLE4.pieces[0], EXAMPLE4.pieces[1], example4_interface(t), t)
    assert r.passed
    r = gluing_check(parse_expression("x^2"), parse_expression("x^2+x"), 0 * t, t)
    assert not r.passed and r.details["max_gradient_gap"] == pytest.approx(1.0)


def test_energy():
    assert energy_value(field(lambda x, t: x * x - 1 + 0 * t)) == 0.0
    e1 = energy_value(field(lambda x, t: (x * x - 1) * (1 + 0.3 * t)))
    g = SpaceTimeGrid(-1.0, 1.0, 33, 33)
    m = field(lambda x, t: (x * x - 1) * (1 + 0.3 * t))
    e2 = energy_value(field(lambda x, t: (x * x - 1) * (1 + 0.6 * t), g), m)
    assert e2 == pytest.approx(4 * e1, rel=1e-12)
    assert energy(m).passed


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_affine_is_flat(p, q, c):
    u = field(lambda x, t: p * x + q * t + c)
    assert convexity_check(u).passed
    assert c11_seminorm(u).measured <= 1e-9
    assert quadratic_growth_check(u, pairs=50).measured <= 1e-9
    assert lipschitz_constant(u).measured == pytest.approx(max(abs(p), abs(q)), abs=1e-9)


def test_quadratic_growth_stable():
    a = quadratic_growth_check(oracle_grid("example3", 65, 65), R, pairs=500).measured
    b = quadratic_growth_check(oracle_grid("example3", 129, 129), R, pairs=500).measured
    assert abs(b / a - 1) <= 0.2


def test_quadratic_growth_corner_grows():
    u = oracle_grid("example3", 257, 257)
    vals = []
    for r in (0.4, 0.2, 0.1):
        reg = CheckRegion(radius=r, corners=((-1.0, 1.0),), box=(-1, -1 + 3 * r, 1 - 3 * r, 1))
        vals.append(quadratic_growth_check(u, reg, pairs=1000).measured)
    assert vals[1] > 1.5 * vals[0] and vals[2] > 1.5 * vals[1]


def test_run_checks_report(ex3_129, tmp_path):
    rep = run_checks(ex3_129, ["c11", "convexity"], R)
    assert [c.name for c in rep.checks] == ["convexity", "c11"]
    data = json.loads(rep.to_json())
    assert data["seed"] == 20190611 and data["grid"]["nx"] == 129
    assert run_checks(ex3_129, []).passed
    with pytest.raises(ValueError):
        run_checks(ex3_129, ["nope"])
