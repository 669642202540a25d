import pytest

from mabuchi.expr import parse_expression
from mabuchi.potential import NotConvexError, gradient_image, images_equal, validate_potential
from conftest import DERIVED_PSI


def test_members(unit):
    d = validate_potential(parse_expression("x^2-1"), unit)
    assert d.member and d.min_hessian_eig == pytest.approx(2.0)
    d = validate_potential(parse_expression(DERIVED_PSI), unit)
    assert d.member
    assert d.min_hessian_eig == pytest.approx(1.6, abs=1e-12)
    assert d.argmin[0] == pytest.approx(0.0, abs=1e-12)


def test_non_member(unit):
    d = validate_potential(parse_expression("x^3"), unit)
    assert not d.member
    assert d.min_hessian_eig < 0 and d.max_boundary_abs == pytest.approx(1.0)


@pytest.mark.parametrize("text,lo,hi", [("x^2-1", -2, 2), ("2*(x^2-1)", -4, 4), (DERIVED_PSI, -2, 2)])
def test_gradient_image(unit, text, lo, hi):
    im = gradient_image(parse_expression(text), unit)
    assert (im.lo, im.hi) == pytest.approx((lo, hi), abs=1e-14)


def test_images_equal(unit, ex3_pair, derived_pair):
    assert not images_equal(*ex3_pair, unit)
    assert images_equal(ex3_pair[0], ex3_pair[0], unit)
    assert images_equal(*derived_pair, unit)
    assert str(gradient_image(ex3_pair[0], unit)) == "(-4,4)"


def test_not_convex(unit):
    with pytest.raises(NotConvexError):
        gradient_image(parse_expression("1-x^2"), unit)
