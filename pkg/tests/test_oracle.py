from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EQS
from quadsolve.oracle import (
    Arc,
    Line,
    PoleApproach,
    PoleOnLoop,
    TrajectoryPath,
    integrate_path,
    integrate_to,
    monodromy,
    sample_path,
    singularity_exponent,
)


def riccati(y):
    return (y[0] * y[0],)


def test_riccati_exact():
    # x' = x^2, x(0) = x0 -> x0 / (1 - x0 t)
    x0 = 0.4 + 0.3j
    for t in (0.5, 1.0 + 0.5j, -2.0):
        (x,) = integrate_to(riccati, (x0,), t)
        assert abs(x - x0 / (1 - x0 * t)) < 1e-10 * abs(x)


def test_pole_detected_with_estimate():
    with pytest.raises(PoleApproach) as info:
        integrate_to(riccati, (1.0,), 2.0)
    assert abs(info.value.t_est - 1.0) < 1e-3


def test_simple_pole_exponent():
    with pytest.raises(PoleApproach) as info:
        integrate_path(riccati, (1.0 + 0j,), TrajectoryPath([Line(0, 2)]), blowup=1e9)
    p, err, ts = singularity_exponent(info.value.trajectory, f=riccati)
    assert p == pytest.approx(-1.0, abs=0.02) and abs(ts - 1.0) < 1e-6


def test_path_geometry_and_json():
    arc = Arc(0.0, 2.0, 0.0, math.pi)
    assert abs(arc.end - (-2)) < 1e-14 and arc.length() == pytest.approx(2 * math.pi)
    path = TrajectoryPath([Line(0, 2), arc])
    again = TrajectoryPath.from_json(path.to_json())
    assert again.end == pytest.approx(path.end)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.8), st.floats(-math.pi, math.pi))
def test_path_independence_around_no_singularity(r, phase):
    # two different paths to the same endpoint agree when no pole lies between them
    x0 = 0.3 * cmath.exp(1j * phase)
    end = r * cmath.exp(0.5j)
    direct = integrate_to(riccati, (x0,), end)[0]
    bent = integrate_path(riccati, (x0,), TrajectoryPath.polyline([0, 0.5j * r, end]), record=False).final[0]
    assert abs(direct - bent) < 1e-9 * abs(direct)


def test_self_convergence():
    f = EQS.system().rhs()
    x0 = (0.7 - 0.2j, 0.4 + 0.5j)
    loose = integrate_to(f, x0, 1.0, rtol=1e-7, atol=1e-9)
    tight = integrate_to(f, x0, 1.0, rtol=1e-12, atol=1e-14)
    err = max(abs(a - b) for a, b in zip(loose, tight)) / max(abs(b) for b in tight)
    assert 1e-15 < err < 1e-6


def test_sample_path_starts_at_initial_state():
    out = sample_path(riccati, (0.2,), [0, 0.1, 0.2])
    assert out[0] == (0.2,) and len(out) == 3


def test_monodromy_sqrt_branch():
    # y' = 1/(2y) has y = sqrt(t + y0^2): two sheets around t = -y0^2
    def f(v):
        return (0.5 / v[0],)

    r = monodromy(f, (1.0 + 0j,), -1.0, 0.5, 4)
    assert r.cycle == 2
    r = monodromy(f, (1.0 + 0j,), 3.0, 0.5, 4)
    assert r.cycle == 1


def test_pole_on_loop():
    with pytest.raises(PoleOnLoop):
        # the circle through t = 0 and t = 1 crosses the pole of x0 / (1 - x0 t)
        monodromy(riccati, (1.0 + 0j,), 0.5, 0.5, 2)
