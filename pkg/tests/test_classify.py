from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from quadsolve.algebra import GaussianRational as G
from quadsolve.canonical import Exc1, Exc2, Exc3, Nor, Uncoupled
from quadsolve.classify import (
    AB_from_exponents,
    AZeroOrOne,
    SumZero,
    b0_exponent,
    classify,
    exponents_from_AB,
)

small = st.fractions(min_value=-9, max_value=9, max_denominator=7)


@pytest.mark.parametrize(
    "A, B2, text",
    [
        (F(3, 4), 0, "Case31 n=2 q=2"),
        (-1, 0, "Garnier entry=s_VI"),
        (-2, 0, "Case34"),
        (F(-1, 5), F(-27, 50), "Case34"),
        (F(3, 2), F(27, 5), "Case33 n=2 m=3"),
        (F(-1, 3), F(-2, 9), "Garnier entry=s_VI"),
        (F(-1, 5), F(-1, 25), "Garnier entry=s_VII"),
        (-1, -1, "Garnier entry=s_VII"),
        (F(-1, 2), -1, "Garnier entry=s_VII"),
        (F(-1, 2), 0, "Garnier entry=s_V"),
        (F(2, 3), F(1, 9), "Case31 n=2 q=1"),
        (F(1, 3), F(-25, 18), "Case31 n=2 q=-1/2"),
        (2, F(81, 7), "Case32 n=1 q=9/5"),
        (F(1, 2), 0, "Case31 n=1 q=1"),
    ],
)
def test_known_verdicts(A, B2, text):
    assert str(classify(Nor(A, B2))) == text


def test_irrational_exponents_not_algebraic():
    v = classify(Nor(F(3, 10), F(1, 7)))
    assert v.tag == "NotAlgebraic" and not v.is_algebraic


def test_logarithmic_exclusion():
    # nu = (3, -1): the antiderivative has a log term
    A, B2 = AB_from_exponents(3, -1)
    v = classify(Nor(A, B2))
    assert v.tag == "NotAlgebraic" and v.reason == "logarithmic"


def test_exceptional_forms():
    assert classify(Exc1(0)).entry == "s_II"
    assert classify(Exc1(1)).kind == "exc1"
    assert classify(Exc3(2)).entry == "s_IV"
    assert classify(Exc2(1, 0)).entry == "S_I2"
    assert classify(Uncoupled(1, 0)).tag == "Trivial"


def test_float_parameters_snap_to_rationals():
    assert str(classify(Nor(0.75, 0.0))) == "Case31 n=2 q=2"
    v = classify(Nor(0.16647055597062635 - 0.40397325223248015j, -0.1551376695888947 + 0.9500761319195132j))
    assert v.tag == "NotAlgebraic" and len(v.orbit) == 1


@given(small, small)
def test_exponent_round_trip(p, m):
    assume(p and m and p + m and p + m != 1)
    A, B2 = AB_from_exponents(p, m)
    try:
        ex = exponents_from_AB(A, B2)
    except ArithmeticError:
        return
    assert {ex.nu_plus, ex.nu_minus} == {G(p), G(m)}


@given(small, small)
def test_b_sign_swaps_exponents(p, m):
    assume(p and m and p + m and p + m != 1 and p != m)
    A, B2 = AB_from_exponents(p, m)
    try:
        a = exponents_from_AB(A, B2, 1)
        b = exponents_from_AB(A, B2, -1)
    except ArithmeticError:
        return
    assert (a.nu_plus, a.nu_minus) == (b.nu_minus, b.nu_plus)


@given(small, small)
def test_verdict_independent_of_b_sign(p, m):
    assume(p and m and p + m and p + m != 1)
    A, B2 = AB_from_exponents(p, m)
    try:
        a, b = classify(Nor(A, B2, 1)), classify(Nor(A, B2, -1))
    except ArithmeticError:
        return
    assert a.key() == b.key()


def test_exponent_sum_rule():
    # 1/(1 - A) = nu_plus + nu_minus
    ex = exponents_from_AB(F(2, 3), F(1, 9))
    assert ex.nu_plus + ex.nu_minus == G(3)


def test_ab_errors():
    with pytest.raises(SumZero):
        AB_from_exponents(1, -1)
    with pytest.raises(AZeroOrOne):
        exponents_from_AB(1, 0)


@pytest.mark.parametrize("A, nu, fam, n", [(F(3, 4), 2, "plus", 2), (2, F(-1, 2), "minus", 1), (-2, F(1, 6), None, None)])
def test_b0_exponent(A, nu, fam, n):
    r = b0_exponent(A)
    assert (r.nu, r.family, r.n) == (G(nu), fam, n)


def test_json_record():
    d = classify(Nor(F(3, 4), 0)).to_json()
    assert d["tag"] == "Case31" and d["n"] == 2 and d["q"] == "2"
    assert {"A": "2", "B2": "25/3"} in d["orbit"]
