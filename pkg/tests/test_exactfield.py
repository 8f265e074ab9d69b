import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bellsos.exactfield import (
    ZERO, ONE, I_UNIT, SQRT2, AlgebraicScalar, AmbiguityError, FieldError,
    FieldTower, ParseError, parse_scalar, rational, recognize, serialize,
    sqrt_rational, to_float, to_real_float,
)


def test_basic_arithmetic():
    a = rational(1, 2) + SQRT2
    b = a * a
    # (1/2 + sqrt2)^2 = 1/4 + 2 + sqrt2 = 9/4 + sqrt2
    assert b == rational(9, 4) + SQRT2
    assert (a - a).is_zero()
    assert a - rational(1, 2) == SQRT2


def test_sqrt_reduces_square_parts():
    assert sqrt_rational(8) == rational(2) * SQRT2
    assert sqrt_rational(Fraction(9, 4)) == rational(3, 2)
    assert sqrt_rational(Fraction(1, 2)) == SQRT2 / 2
    assert sqrt_rational(-2) == I_UNIT * SQRT2
    assert sqrt_rational(0).is_zero()


def test_radical_products_reduce():
    s6 = sqrt_rational(6)
    s3 = sqrt_rational(3)
    assert SQRT2 * s6 == rational(2) * s3
    assert s6 * s6 == rational(6)


def test_imaginary_unit():
    assert I_UNIT * I_UNIT == rational(-1)
    z = rational(1, 3) + rational(2) * I_UNIT
    assert z.conj() == rational(1, 3) - rational(2) * I_UNIT
    assert (z * z.conj()).is_rational()
    assert z * z.conj() == rational(1, 9) + rational(4)


def test_division():
    a = rational(3, 7) + rational(5, 2) * SQRT2 + sqrt_rational(3)
    assert a * a.inverse() == ONE
    b = rational(2) + I_UNIT * sqrt_rational(5)
    assert (b / b) == ONE
    assert ONE / SQRT2 == SQRT2 / 2
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_sign_and_ordering():
    c_minus = SQRT2 - 1
    assert c_minus.sign() == 1
    assert (c_minus - 1).sign() == -1
    assert rational(0).sign() == 0
    # 2*sqrt(2) > e-ish rational below it
    assert rational(2) * SQRT2 > rational(28, 10)
    assert sqrt_rational(3) < rational(7, 4)
    with pytest.raises(FieldError):
        I_UNIT.sign()


def test_to_float():
    v = to_float(rational(2) * SQRT2)
    assert abs(v - 2 * math.sqrt(2)) < 1e-15
    assert to_real_float(rational(-1, 3)) == pytest.approx(-1 / 3)
    hi = to_float(SQRT2, 200)
    import mpmath
    with mpmath.workprec(220):
        assert abs(hi - mpmath.sqrt(2)) < mpmath.mpf(2) ** -195


def test_serialize_round_trip():
    samples = [
        ZERO,
        ONE,
        rational(-5, 3),
        SQRT2 * rational(2),
        rational(1, 2) - rational(1, 3) * sqrt_rational(3) * I_UNIT,
        I_UNIT,
        (SQRT2 + I_UNIT * sqrt_rational(33) / 4 - rational(7, 5)),
    ]
    for a in samples:
        assert parse_scalar(serialize(a)) == a


def test_serialize_format():
    assert serialize(rational(2) * SQRT2) == "(2/1)*sqrt(2)"
    assert serialize(ZERO) == "(0/1)"
    assert serialize(rational(1, 2) + I_UNIT) == "(1/2)+(1/1)*i"
    assert parse_scalar("(1/1)*sqrt(8)") == rational(2) * SQRT2


def test_parse_errors():
    for bad in ["", "(1/0)", "sqrt(2)", "(1/2)*sqrt(-3)", "(a/b)"]:
        with pytest.raises(ParseError):
            parse_scalar(bad)


def test_tower_join_and_basis():
    t = FieldTower([2, 6])
    assert t.basis_radicands() == [1, 2, 3, 6]
    t2 = t.join(FieldTower([11], imaginary=True))
    assert t2.imaginary
    assert 22 in t2.radicands
    with pytest.raises(FieldError):
        FieldTower([4])


def test_recognize_simple():
    t = FieldTower([2])
    got = recognize(2.8284271, t, denom_bound=10, tol=1e-6)
    assert got == rational(2) * SQRT2
    got = recognize(0.5, FieldTower(), denom_bound=10, tol=1e-9)
    assert got == rational(1, 2)
    got = recognize(-0.41421356237, t, denom_bound=10, tol=1e-9)
    assert got == ONE - SQRT2


def test_recognize_complex_and_failure():
    t = FieldTower([2], imaginary=True)
    z = complex(to_float(SQRT2 / 2 - I_UNIT * rational(1, 4)))
    assert recognize(z, t, 10, 1e-9) == SQRT2 / 2 - I_UNIT * rational(1, 4)
    with pytest.raises(FieldError):
        recognize(0.123456789, FieldTower(), denom_bound=5, tol=1e-9)
    with pytest.raises(FieldError):
        recognize(1j, FieldTower([2]), 10, 1e-9)


def test_recognize_ambiguous():
    with pytest.raises(AmbiguityError):
        recognize(0.5005, FieldTower(), denom_bound=1000, tol=1e-2)


def test_recognize_multi_radical():
    t = FieldTower([3, 11])
    target = (rational(5) * sqrt_rational(33) - 21) / 16
    got = recognize(to_real_float(target), t, denom_bound=64, tol=1e-9)
    assert got == target


scalars = st.builds(
    lambda p, q, r, s, m: rational(p, q) + rational(r, s) * sqrt_rational(m),
    st.integers(-40, 40), st.integers(1, 12),
    st.integers(-40, 40), st.integers(1, 12),
    st.sampled_from([2, 3, 5, 6, 7, 33]),
)


@settings(max_examples=150, deadline=None)
@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a + ZERO == a
    assert a * ONE == a
    if not a.is_zero():
        assert a * a.inverse() == ONE


@settings(max_examples=150, deadline=None)
@given(scalars, scalars)
def test_conj_is_homomorphism(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    ia = a * I_UNIT
    assert ia.conj() == -I_UNIT * a.conj()


@settings(max_examples=100, deadline=None)
@given(scalars)
def test_serialize_parse_round_trip_property(a):
    assert parse_scalar(serialize(a)) == a


@settings(max_examples=60, deadline=None)
@given(scalars)
def test_embedding_is_consistent(a):
    va = to_float(a)
    vb = to_float(a * a)
    assert abs(va * va - vb) < 1e-9 * (1 + abs(vb))
