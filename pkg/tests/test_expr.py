import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kairon.expr import (
    ExpressionDomainError,
    ExpressionError,
    ExpressionSyntaxError,
    bump,
    parse,
)


def ev(src, t=0.0, w=(0.0,), m=1):
    return float(parse(src, m)(t, np.array(w)))


@pytest.mark.parametrize(
    "src,value",
    [
        ("1+2*3", 7.0),
        ("(1+2)*3", 9.0),
        ("1-2-3", -4.0),
        ("8/4/2", 1.0),
        ("-2^2", -4.0),
        ("2^-1", 0.5),
        ("2^3^2", 512.0),
        ("--3", 3.0),
        ("+3", 3.0),
        ("1.5e2", 150.0),
        (".5", 0.5),
        ("2E-1", 0.2),
        ("exp(0)+cos(0)+sin(0)+sqrt(4)+abs(-1)+tanh(0)", 5.0),
    ],
)
def test_precedence_and_literals(src, value):
    assert ev(src) == value


def test_bump():
    assert ev("bump(0)") == pytest.approx(math.exp(-1.0))
    assert ev("bump(1)") == 0.0 and ev("bump(-1.0)") == 0.0 and ev("bump(3)") == 0.0
    x = np.linspace(-0.999, 0.999, 101)
    assert np.all(bump(x) > 0)


def test_variables_and_vectorisation():
    e = parse("t*w1 + w2^2 - w3", 3)
    t = np.linspace(0, 1, 5)
    w = np.array([[1.0, 2.0, 3.0]])
    assert e(t, w).shape == (5,)
    assert np.allclose(e(t, w), t + 4 - 3)
    assert e.variables == frozenset({"t", "w1", "w2", "w3"})
    assert e(np.zeros((4, 7)), np.ones((4, 7, 3))).shape == (4, 7)


@pytest.mark.parametrize(
    "src,offset",
    [
        ("1+", 2),
        ("foo(t)", 0),
        ("w4", 0),
        ("(1", 2),
        ("1 2", 2),
        ("t $ 1", 2),
        ("sin t", 0),
        ("", 0),
    ],
)
def test_syntax_errors_carry_offset(src, offset):
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse(src, 3)
    assert exc.value.offset == offset


def test_syntax_error_line_and_column():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse("1 +\n  * 2", 1)
    assert (exc.value.line, exc.value.column) == (2, 3)


def test_variable_outside_dimension():
    with pytest.raises(ExpressionSyntaxError):
        parse("w2", 1)
    parse("w2", 2)


@pytest.mark.parametrize("src", ["1/(t-t)", "sqrt(-1-t^2)", "(-2)^0.5", "0^-1"])
def test_domain_errors(src):
    with pytest.raises(ExpressionDomainError):
        parse(src, 1)(0.0, [1.0])


def test_negative_base_integer_power_allowed():
    assert ev("(-2)^3") == -8.0


def test_dimension_mismatch_on_evaluate():
    with pytest.raises(ExpressionError):
        parse("w1", 2)(0.0, np.ones(3))


def _sources():
    leaf = st.one_of(
        st.sampled_from(["t", "w1", "w2"]),
        st.floats(0, 10, allow_nan=False).map(repr),
    )

    def extend(children):
        return st.one_of(
            st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda a: f"{a[0]} {a[1]} {a[2]}"),
            st.tuples(children, children).map(lambda a: f"({a[0]})/(2+({a[1]})^2)"),
            children.map(lambda a: f"-{a}"),
            children.map(lambda a: f"({a})^2"),
            st.tuples(st.sampled_from(["sin", "cos", "tanh", "abs"]), children).map(lambda a: f"{a[0]}({a[1]})"),
        )

    return st.recursive(leaf, extend, max_leaves=8)


@settings(max_examples=200)
@given(_sources())
def test_print_parse_roundtrip(src):
    e = parse(src, 2)
    again = parse(str(e), 2)
    assert again.root == e.root
    t = np.linspace(-1, 1, 7)
    w = np.array([0.6, 0.8])
    with np.errstate(all="ignore"):
        assert np.array_equal(e(t, w), again(t, w), equal_nan=True)


@settings(max_examples=100)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_matches_python_arithmetic(a, b):
    e = parse("(t - w1) * (t + w1) / (1 + t^2) - 3 * t", 1)
    assert float(e(a, [b])) == pytest.approx((a - b) * (a + b) / (1 + a * a) - 3 * a, rel=1e-12, abs=1e-12)
