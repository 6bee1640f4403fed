from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest

from conftest import EQS, random_ics, rel_dev
from quadsolve.canonical import Uncoupled
from quadsolve.oracle import integrate_path, sample_path
from quadsolve.transforms import (
    count_peaks,
    isochronous_variant,
    measure_newton_period,
    measure_period,
    newton_from_k,
    newton_isochronous,
    newton_reduce,
    newton_solve,
    verify_case34,
)


def test_uncoupled_variant_has_basic_period():
    iso = isochronous_variant(Uncoupled(1, 0).system(), 1.0)
    for x in random_ics(3, 5):
        assert measure_period(iso, x, max_multiple=4).n == 1


def test_linearized_regime():
    iso = isochronous_variant(EQS.system(), 2.0)
    assert measure_period(iso, (1e-4 + 2e-4j, -3e-4j), max_multiple=4).n == 1


def test_omega_must_be_positive():
    with pytest.raises(ValueError):
        isochronous_variant(EQS.system(), 0.0)


def test_periods_bounded_by_sheet_count():
    iso = isochronous_variant(EQS.system(), 1.0)
    ns = [measure_period(iso, x, max_multiple=6).n for x in random_ics(23, 12)]
    assert all(n in (1, 2, 3) for n in ns)


def test_dressing_identity():
    iso = isochronous_variant(EQS.system(), 1.0)
    x0 = (0.3 + 0.2j, -0.1 + 0.4j)
    t_end = 2.0
    ts = np.linspace(0, t_end, 9)
    dressed = sample_path(iso.rhs(), x0, ts)
    base = integrate_path(EQS.system().rhs(), x0, iso.tau_path(t_end))
    # the base trajectory reaches tau(t_end) along the circle
    assert abs(base.times[-1] - iso.tau(t_end)) < 1e-12
    undressed = iso.undress(ts[-1], dressed[-1])
    assert rel_dev([undressed], [base.final]) < 1e-8
    assert rel_dev([iso.dress(ts[-1], base.final)], [dressed[-1]]) < 1e-8


@pytest.mark.parametrize(
    "A, k, family, n",
    [(F(3, 4), F(-5, 3), "odd", 2), (-2, F(2), None, None), (2, F(0), "unit", 1), (F(1, 2), F(-3), "odd", 1)],
)
def test_newton_reduce(A, k, family, n):
    ns = newton_reduce(A)
    assert ns.k == k and ns.family == family and ns.n == n


def test_unit_family():
    ns = newton_from_k(F(-1, 2))
    assert (ns.family, ns.n) == ("unit", 2)


@pytest.mark.parametrize("k", [-3, F(-5, 3), 0, F(-1, 2)])
def test_energy_conserved_and_routes_agree(k):
    ns = newton_from_k(k)
    grid = np.linspace(0, 0.5, 26)
    a = newton_solve(ns, 0.7 + 0.3j, -0.2 + 0.5j, grid)
    b = newton_solve(ns, 0.7 + 0.3j, -0.2 + 0.5j, grid, route="numeric")
    assert a.energy_drift <= 1e-9 and b.energy_drift <= 1e-9
    assert np.max(np.abs(a.z - b.z)) < 1e-9


def test_k_zero_is_driven_free_motion():
    # A = 2: z'' = -4
    ns = newton_from_k(0)
    grid = np.linspace(0, 1, 11)
    z0, v0 = 0.7 + 0.3j, -0.2 + 0.5j
    tr = newton_solve(ns, z0, v0, grid, route="numeric")
    assert np.max(np.abs(tr.z - (z0 + v0 * grid - 2 * grid**2))) < 1e-12


def test_newton_rejects_log_potential():
    with pytest.raises(ValueError):
        newton_solve(newton_from_k(-1), 1, 0, [0, 1])


def test_newton_isochronous_structure():
    ni = newton_isochronous(-3, 1.0)
    assert ni.alpha == F(-1, 2)
    r1, r2 = ni.linear_roots()
    assert r1 == pytest.approx(-0.5j) and r2 == pytest.approx(0.5j)
    # linear roots solve r^2 - i c1 w r - c2 w^2 = 0
    for r in (r1, r2):
        assert abs(r * r - 1j * float(ni.c1) * r - float(ni.c2)) < 1e-14


def test_newton_isochronous_k0_closed_form():
    # k = 0: zt = -1/(2 w^2) + a exp(-2 i w t) + b exp(-i w t)
    ni = newton_isochronous(0, 1.3)
    w = 1.3
    a, b = 0.2 + 0.1j, -0.3 + 0.05j
    z = lambda t: -1 / (2 * w * w) + a * np.exp(-2j * w * t) + b * np.exp(-1j * w * t)
    zd = lambda t: -2j * w * a * np.exp(-2j * w * t) - 1j * w * b * np.exp(-1j * w * t)
    ts = np.linspace(0, 2, 5)
    out = sample_path(ni.rhs(), (np.log(z(0)), zd(0)), ts)
    assert max(abs(np.exp(l) - z(t)) for (l, _), t in zip(out, ts)) < 1e-9


def test_newton_isochronous_period_is_integer_multiple():
    ni = newton_isochronous(-3, 1.0)
    r = measure_newton_period(ni, 0.8 + 0.3j, 0.1 - 0.2j, max_multiple=8)
    assert r.n is not None


def test_case34_residual():
    rep = verify_case34(0.4 + 0.3j, -0.2 + 0.1j, [0.1, 0.3, 0.5])
    assert rep.residual < 1e-6


def test_count_peaks_on_synthetic_signal():
    t = np.linspace(0, 100, 20001)
    v = np.where((t % 10) < 0.2, 5.0, 0.0) + 0.01 * np.sin(t)
    peaks, median = count_peaks(t, v)
    # plateaus at t = 0, 10, ..., 100
    assert len(peaks) == 11 and median == pytest.approx(0.0, abs=0.02)
