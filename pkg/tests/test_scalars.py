from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from freeloop.scalars import FieldError, FieldSpec, Q, Scalar, arith

F5 = FieldSpec(5)
FIELDS = [Q, FieldSpec(2), F5, FieldSpec(32003)]

values = st.fractions(max_denominator=10 ** 6).filter(lambda x: abs(x.numerator) < 10 ** 12)


def test_examples():
    assert arith(Q.scalar("1/2"), Q.scalar("1/3"), "add") == Q.scalar("5/6")
    assert arith(F5.scalar(2), F5.scalar(3), "mul") == F5.scalar(1)
    for f in FIELDS:
        x = f.scalar(7) if f.p != 7 else f.scalar(3)
        assert arith(x, x, "div") == f.one


def test_rationals_lowest_terms():
    s = Q.scalar("6/-4")
    assert s.value == mpq(-3, 2)
    assert s.value.denominator > 0
    assert F5.scalar(-1).value == 4


def test_errors():
    with pytest.raises(ZeroDivisionError):
        arith(Q.scalar(1), Q.scalar(0), "div")
    with pytest.raises(FieldError):
        arith(Q.scalar(1), F5.scalar(1), "add")
    with pytest.raises(FieldError):
        FieldSpec(6)
    with pytest.raises(FieldError):
        F5.coerce("1/5")
    with pytest.raises(ValueError):
        arith(Q.scalar(1), Q.scalar(1), "pow")


def test_parse_and_json():
    assert FieldSpec.parse("q") == Q
    assert FieldSpec.parse("fp:32003") == FieldSpec(32003)
    assert FieldSpec.from_json({"Fp": 7}).to_json() == {"Fp": 7}
    assert FieldSpec.from_json("Q").to_json() == "Q"
    assert Q.characteristic == 0 and F5.characteristic == 5
    with pytest.raises(FieldError):
        FieldSpec.from_json("R")


@pytest.mark.parametrize("field", FIELDS)
@settings(max_examples=60, deadline=None)
@given(a=values, b=values, c=values)
def test_field_axioms(field, a, b, c):
    try:
        x, y, z = field.scalar(a), field.scalar(b), field.scalar(c)
    except FieldError:
        return
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x and x * y == y * x
    assert x - x == field.zero
    if x:
        assert x * (1 / x) == field.one


@settings(max_examples=50, deadline=None)
@given(a=st.integers(min_value=1, max_value=10 ** 60), b=st.integers(min_value=1, max_value=10 ** 60))
def test_big_rationals_exact(a, b):
    x = Q.scalar(Fraction(a, b))
    y = Q.scalar(Fraction(b, a))
    assert x * y == Q.one
    assert isinstance(x, Scalar)
