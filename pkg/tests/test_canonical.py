from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import rel_dev
from quadsolve.algebra import GaussianRational as G
from quadsolve.canonical import (
    DegenerateOrbit,
    Exc2,
    GeneralSystem,
    IrreducibleSystem,
    LinearTransform,
    Nor,
    Uncoupled,
    ZeroSystem,
    equivalence_orbit,
    orbit_member_numeric,
    orbit_transform,
    reduce_to_canonical,
)
from quadsolve.oracle import integrate_to

cplx = st.complex_numbers(max_magnitude=3, min_magnitude=0.05, allow_nan=False, allow_infinity=False)


def test_zero_system_rejected():
    with pytest.raises(ZeroSystem):
        GeneralSystem(0, 0, 0, 0, 0, 0)


def test_mixed_exact_and_float_becomes_float():
    s = GeneralSystem(G(1), 0.5, 0, 0, 0, 0)
    assert not s.is_exact


def test_canonical_input_is_fixed_point():
    red = reduce_to_canonical(GeneralSystem.canonical(F(3, 4), 0))
    assert isinstance(red.form, Nor) and red.exact
    assert red.form.A == G(F(3, 4)) and red.form.Bsq == 0


def test_transformed_round_trip():
    s = GeneralSystem(G(1), G(2), G(-1), G(F(1, 2)), G(0, 1), G(3))
    T = [[G(1), G(2)], [G(-1), G(1)]]
    back = s.transformed(T).transformed(LinearTransform(1, 2, -1, 1).inverse())
    assert np.allclose(back.numeric(), s.numeric(), atol=1e-14)
    assert s.transformed(T).is_exact


@settings(max_examples=30, deadline=None)
@given(st.lists(cplx, min_size=6, max_size=6), cplx, cplx)
def test_reduction_conjugates_flows(coeffs, y1, y2):
    s = GeneralSystem(*coeffs)
    try:
        red = reduce_to_canonical(s)
    except IrreducibleSystem:
        return
    y0 = (0.3 * y1 / abs(y1), 0.3 * y2 / abs(y2))
    yt = integrate_to(red.form.system().rhs(), y0, 0.2)
    xt = integrate_to(s.rhs(), red.transform.apply(y0), 0.2)
    assert rel_dev([red.transform.apply(yt)], [xt]) < 1e-8


def test_homogeneity_of_rescaled_system():
    # scaling all coefficients by c is a time rescaling: same canonical orbit
    s = GeneralSystem(G(2), G(1), G(-1), G(1), G(3), G(F(1, 2)))
    a = reduce_to_canonical(s).form
    b = reduce_to_canonical(s.transformed([[G(3), G(0)], [G(0), G(3)]])).form
    assert complex(a.A) == pytest.approx(complex(b.A)) and complex(a.Bsq) == pytest.approx(complex(b.Bsq))


def test_a2_pattern_is_flagged():
    red = reduce_to_canonical(GeneralSystem(2, 0, 3, 0, 3, 2))
    assert red.degenerate_pattern == "A2"
    assert isinstance(red.form, Exc2)


def test_irreducible_system():
    with pytest.raises(IrreducibleSystem):
        reduce_to_canonical(GeneralSystem(1, 0, 0, 1, 0, 1))


def test_uncoupled():
    red = reduce_to_canonical(GeneralSystem(1, 0, 0, 0, 0, 0))
    assert isinstance(red.form, Uncoupled)


def test_orbit_examples():
    orb = [(str(a), str(b)) for a, b in equivalence_orbit(-1, 0)]
    assert orb[0] == ("-1", "0") and ("-1/3", "-2/9") in orb
    orb = {(str(a), str(b)) for a, b in equivalence_orbit(F(-1, 2), -1)}
    assert orb == {("-1/5", "-1/25"), ("-1", "-1"), ("-1/2", "-1")}
    orb = equivalence_orbit(-2, 0)
    assert any(complex(a) == pytest.approx(-0.2) and complex(b) == pytest.approx(-0.54) for a, b in orb)


def test_degenerate_orbit():
    # B^2 = (1 - 2A)^2 makes the orbit formulas singular
    with pytest.raises(DegenerateOrbit):
        equivalence_orbit(F(1, 3), F(1, 9))


@pytest.mark.parametrize("A, B", [(0.3 + 0.2j, 0.7 - 0.1j), (-0.5, 1j), (2, 9 / 7**0.5)])
@pytest.mark.parametrize("s1, s2", [(1, 1), (1, -1), (-1, 1), (-1, -1)])
def test_orbit_transform_maps_members(A, B, s1, s2):
    T = orbit_transform(A, B, s1, s2)
    Ap, Bp = orbit_member_numeric(A, B * B, s1, s2, B)
    y0 = (0.2 + 0.1j, -0.15 + 0.05j)
    yt = integrate_to(GeneralSystem.canonical(Ap, Bp).rhs(), y0, 0.5)
    xt = integrate_to(GeneralSystem.canonical(A, B).rhs(), T.apply(y0), 0.5)
    assert rel_dev([T.apply(yt)], [xt]) < 1e-9


def test_orbit_closure():
    # every member's orbit is the same set
    base = {(str(a), str(b)) for a, b in equivalence_orbit(F(3, 4), 0)}
    for a, b in list(base):
        again = {(str(x), str(y)) for x, y in equivalence_orbit(G.parse(a), G.parse(b))}
        assert again == base


def test_transform_json_and_inverse():
    T = LinearTransform(1, 2j, -1, 3)
    assert np.allclose(T.compose(T.inverse()).matrix, np.eye(2))
    assert len(T.to_json()) == 2
    with pytest.raises(ValueError):
        LinearTransform(1, 2, 2, 4)
