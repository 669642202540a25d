import numpy as np
import pytest

from mabuchi.grid import GridField, GridFormatError, SpaceDomain, SpaceTimeGrid, read_grid_csv


def test_grid_geometry():
    g = SpaceTimeGrid(-1.0, 1.0, 5, 3)
    assert g.hx == 0.5 and g.ht == 0.5
    X, T = g.mesh()
    assert X.shape == (3, 5)
    assert g.refine().nx == 9


def test_domain_from_text():
    d = SpaceDomain.from_text("-1,1")
    assert (d.a, d.b) == (-1.0, 1.0)
    with pytest.raises(ValueError):
        SpaceDomain.from_text("1,-1")
    with pytest.raises(ValueError):
        SpaceDomain.from_text("abc")


def test_csv_roundtrip_exact():
    g = SpaceTimeGrid(-1.0, 1.0, 7, 5)
    rng = np.random.default_rng(0)
    u = GridField(g, rng.normal(size=(5, 7)), "analytic", rng.integers(1, 4, size=(5, 7)))
    back = read_grid_csv(u.to_csv())
    np.testing.assert_array_equal(back.values, u.values)
    np.testing.assert_array_equal(back.region, u.region)
    assert back.grid.nx == 7 and back.grid.nt == 5


def test_csv_errors_carry_line():
    text = "x,t,u\n0,0,1\n1,0,oops\n"
    with pytest.raises(GridFormatError) as err:
        read_grid_csv(text)
    assert err.value.line == 3
    with pytest.raises(GridFormatError) as err:
        read_grid_csv("a,b,c\n1,2,3\n")
    assert err.value.line == 1
    with pytest.raises(GridFormatError):
        read_grid_csv("x,t,u\n0,0,1\n1,0,1\n0,1,1\n")


def test_field_validation():
    g = SpaceTimeGrid(0.0, 1.0, 3, 3)
    with pytest.raises(ValueError):
        GridField(g, np.zeros((2, 3)))
    with pytest.raises(ValueError):
        GridField(g, np.full((3, 3), np.nan))
