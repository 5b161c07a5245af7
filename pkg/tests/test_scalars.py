"""Backend arithmetic: cyclotomic field, q-analogs, float agreement."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qloop.errors import NonInvertibleDenominatorError
from qloop.scalars import cyclotomic_polynomial, make_backend

BK3 = make_backend("exact", 3)
BK5 = make_backend("exact", 5)
BK9 = make_backend("exact", 9)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(9) == (1, 0, 0, 1, 0, 0, 1)
    assert cyclotomic_polynomial(15) == (1, -1, 0, 1, -1, 1, 0, -1, 1)


def test_backend_rejects_bad_order():
    with pytest.raises(ValueError):
        make_backend("exact", 4)
    with pytest.raises(ValueError):
        make_backend("exact", 1)
    with pytest.raises(ValueError):
        make_backend("float", 6)


def test_primitivity():
    for bk in (BK3, BK5, BK9):
        powers = [bk.eps_pow(k) for k in range(bk.l)]
        assert bk.eq(bk.eps_pow(bk.l), bk.one)
        for k in range(1, bk.l):
            assert not bk.eq(powers[k], bk.one)


scalars3 = st.builds(
    lambda a, b: BK3.from_int(a) + BK3.from_int(b) * BK3.eps,
    st.integers(-9, 9),
    st.integers(-9, 9),
)


@settings(max_examples=50, deadline=None)
@given(scalars3, scalars3, scalars3)
def test_field_axioms(x, y, z):
    bk = BK3
    assert bk.eq(x + y, y + x)
    assert bk.eq(x * y, y * x)
    assert bk.eq((x + y) + z, x + (y + z))
    assert bk.eq((x * y) * z, x * (y * z))
    assert bk.eq(x * (y + z), x * y + x * z)
    assert bk.eq(x + bk.zero, x)
    assert bk.eq(x * bk.one, x)
    if not bk.is_zero(x):
        assert bk.eq(x * bk.inv(x), bk.one)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        BK3.inv(BK3.zero)


@settings(max_examples=40, deadline=None)
@given(st.integers(-12, 12), st.integers(-12, 12))
def test_eps_pow_homomorphism(a, b):
    for bk in (BK3, BK5):
        assert bk.eq(bk.eps_pow(a) * bk.eps_pow(b), bk.eps_pow(a + b))


def test_fractional_eps_power():
    # 1/2 inverts to 2 mod 3
    assert BK3.eq(BK3.eps_pow(Fraction(1, 2)), BK3.eps_pow(2))
    assert BK5.eq(BK5.eps_pow(Fraction(1, 2)), BK5.eps_pow(3))
    with pytest.raises(NonInvertibleDenominatorError):
        BK9.eps_pow(Fraction(1, 3))


def test_q_int_vanishing():
    for bk in (BK3, BK5):
        for r in range(-2 * bk.l, 2 * bk.l + 1):
            if r % bk.l == 0:
                assert bk.is_zero(bk.q_int(r)), r
            else:
                assert not bk.is_zero(bk.q_int(r)), r


@settings(max_examples=40, deadline=None)
@given(st.integers(-10, 10))
def test_q_int_difference_identity(r):
    for bk in (BK3, BK5):
        lhs = (bk.eps - bk.eps_pow(-1)) * bk.q_int(r)
        assert bk.eq(lhs, bk.eps_pow(r) - bk.eps_pow(-r))


@settings(max_examples=30, deadline=None)
@given(st.integers(-8, 8), st.integers(-8, 8))
def test_q_int_cross_identity(r, s):
    # [r][s+1] - [r+1][s] = [r-s]
    for bk in (BK3, BK5):
        lhs = bk.q_int(r) * bk.q_int(s + 1) - bk.q_int(r + 1) * bk.q_int(s)
        assert bk.eq(lhs, bk.q_int(r - s))


def test_q_factorial_and_binomial():
    assert BK5.eq(BK5.q_factorial(3), BK5.q_int(2) * BK5.q_int(3))
    assert BK5.eq(BK5.q_binomial(4, 2), BK5.q_factorial(4) / (BK5.q_factorial(2) * BK5.q_factorial(2)))
    # at a prime order l, the middle binomials [l choose m] vanish
    for bk in (BK3, BK5):
        for m in range(1, bk.l):
            assert bk.is_zero(bk.q_binomial(bk.l, m)), m
        assert bk.eq(bk.q_binomial(bk.l, 0), bk.one)
    # negative upper argument works through the Laurent route
    assert BK3.eq(BK3.q_binomial(-1, 2), BK3.q_int(-1) * BK3.q_int(-2) / BK3.q_factorial(2))


def test_serialization_round_trip():
    x = BK5.from_rational(Fraction(3, 7)) - BK5.from_int(2) * BK5.eps_pow(3)
    data = BK5.serialize(x)
    assert data["l"] == 5
    assert BK5.eq(BK5.deserialize(data), x)
    with pytest.raises(ValueError):
        BK3.deserialize(data)


def test_to_string():
    x = BK3.one - BK3.from_int(2) * BK3.eps
    assert x.to_string() == "1 - 2*eps"
    y = BK5.from_int(3) * BK5.eps_pow(2)
    assert y.to_string() == "3*eps^2"
    assert BK3.zero.to_string() == "0"


def test_float_agreement_small_orders():
    for l in (3, 5, 7, 9, 11, 13, 15):
        be = make_backend("exact", l)
        bf = make_backend("float", l)
        for r in range(-l, l + 1):
            assert abs(be.embed(be.q_int(r)) - bf.q_int(r)) < 1e-9, (l, r)
        for k in range(-l, l + 1):
            assert abs(be.embed(be.eps_pow(k)) - bf.eps_pow(k)) < 1e-9, (l, k)
        x = be.from_rational(Fraction(2, 3)) + be.eps_pow(1)
        zf = bf.from_rational(Fraction(2, 3)) + bf.eps_pow(1)
        assert abs(be.embed(be.inv(x)) - 1 / zf) < 1e-9, l


def test_float_backend_basics():
    bf = make_backend("float", 3, tolerance=1e-10)
    assert bf.eq(bf.eps_pow(3), bf.one)
    assert bf.is_zero(bf.q_int(3))
    assert not bf.is_exact
    assert bf.describe()["float_epsilon"] == "exp(2*pi*i/l)"
    # complex weight components go through q_int
    z = bf.q_int(0.5 + 0.1j)
    assert abs(z) > 0


def test_describe_exact():
    d = BK3.describe()
    assert d["name"] == "exact" and d["l"] == 3
