from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from congkms.field import Field, make_field, norm_trace, real_signs
from oracles import fundamental_unit as brute_unit

DS = [-1, -2, -3, -5, -7, 2, 3, 5, 6, 10, 13, 15]


def elements(d):
    small = st.integers(-30, 30)
    return st.builds(lambda x, y: Field(d)(x, y), small, small)


def test_make_field_rejects_bad_d():
    for bad in (0, 1, 4, 12, -4, 18):
        with pytest.raises(ValueError):
            make_field(bad)
    assert make_field("Q").d is None
    assert make_field(-1).d == -1


@pytest.mark.parametrize("d,D", [(-1, -4), (-3, -3), (-5, -20), (2, 8), (5, 5), (10, 40), (13, 13)])
def test_discriminant(d, D):
    assert Field(d).discriminant == D


def test_omega_squared():
    for d in DS:
        f = Field(d)
        w = f.omega()
        assert w * w == f(-f.n) + f(f.t) * w


@pytest.mark.parametrize("d", DS)
@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_norm_multiplicative_and_inverse(d, data):
    x = data.draw(elements(d))
    y = data.draw(elements(d))
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y).trace() == x.trace() + y.trace()
    if not x.is_zero():
        assert x * x.inverse() == x.field.one()
        assert (y / x) * x == y


@pytest.mark.parametrize("d", DS)
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_norm_trace_matches_matrix(d, data):
    x = data.draw(elements(d))
    n, t = norm_trace(x)
    assert n == x.norm() and t == x.trace()
    f = x.field
    assert x * x.conj() == f(x.norm()) and x + x.conj() == f(x.trace())


def test_rational_field_arithmetic():
    f = Field(None)
    assert f(Fraction(1, 2)) / f(Fraction(1, 2)) == f(1)
    assert f(3).norm() == 3
    assert f(-6).inverse() == f(Fraction(-1, 6))


def test_real_signs():
    f = Field(2)
    e = f(1) - f.sqrt_d()  # 1 − √2 < 0 < 1 + √2
    assert real_signs(e) == [-1, 1]
    assert real_signs(Field(-1)(1, 1)) == []
    with pytest.raises(ValueError):
        real_signs(f(0))


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10, 13, 15, 19, 21, 22, 46, 61, 94])
def test_fundamental_unit_matches_pell_search(d):
    f = Field(d)
    x, y = brute_unit(d)
    eps = f(x) + f(y) * f.sqrt_d()
    assert f.units.fundamental == eps


@pytest.mark.parametrize("d,w", [(-1, 4), (-3, 6), (-2, 2), (-5, 2), (2, 2), (None, 2)])
def test_roots_of_unity(d, w):
    U = Field(d).units
    assert U.w == w
    z = U.torsion_generator
    assert z ** w == Field(d).one()
    assert all(z ** k != Field(d).one() for k in range(1, w))
