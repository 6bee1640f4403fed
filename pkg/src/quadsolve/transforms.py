"""Isochronous dressing and the Newtonian form of the ``B = 0`` system.

``x(t) = exp(-i w t) * xt(tau)``, ``tau = (exp(i w t) - 1)/(i w)`` turns a
homogeneous quadratic system into one with an extra ``i w x`` term; real
``t`` then moves ``tau`` round a circle of radius ``1/w`` about ``i/w``.

With ``B = 0`` and ``x1 = z^(-1/A)`` the canonical system becomes
``z'' = -A^2 z^k`` with ``k = 1 - 2/A``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import GaussianRational
from .algsolve import build_solution, track
from .canonical import GeneralSystem, Nor
from .classify import exponents_from_AB
from .oracle import (
    Arc,
    Line,
    PoleApproach,
    StepUnderflow,
    TrajectoryPath,
    integrate_path,
    sample_path,
)


# -- isochronous variant ------------------------------------------------------------


@dataclass(frozen=True)
class IsochronousSystem:
    base: GeneralSystem
    omega: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be strictly positive")

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def rhs(self):
        f = self.base.rhs()
        iw = 1j * self.omega

        def g(y):
            a, b = f(y)
            return (iw * y[0] + a, iw * y[1] + b)

        return g

    def tau(self, t: complex) -> complex:
        iw = 1j * self.omega
        return (cmath.exp(iw * t) - 1) / iw

    def tau_path(self, t_end: float) -> TrajectoryPath:
        """Circle traced by ``tau`` as real ``t`` runs from 0 to ``t_end``."""
        return TrajectoryPath([Arc(1j / self.omega, 1 / self.omega, -math.pi / 2, self.omega * t_end)])

    def undress(self, t: complex, xt: Sequence[complex]) -> tuple[complex, complex]:
        """Base-system state at ``tau(t)`` from the dressed state at ``t``."""
        e = cmath.exp(-1j * self.omega * t)
        return e * xt[0], e * xt[1]

    def dress(self, t: complex, x: Sequence[complex]) -> tuple[complex, complex]:
        e = cmath.exp(1j * self.omega * t)
        return e * x[0], e * x[1]


def isochronous_variant(sys: GeneralSystem, omega: float) -> IsochronousSystem:
    return IsochronousSystem(sys, float(omega))


@dataclass
class PeriodResult:
    n: Optional[int]
    returns: list  # relative distance to the start after each basic period
    event: Optional[str] = None


def _return_periods(f, y0, T: float, max_multiple: int, tol: float, compare, rtol: float) -> PeriodResult:
    y = tuple(complex(v) for v in y0)
    ref = compare(y)
    norm = max(abs(v) for v in ref)
    dists = []
    for n in range(1, max_multiple + 1):
        path = TrajectoryPath([Line((n - 1) * T, n * T)])
        try:
            y = integrate_path(f, y, path, rtol=rtol, atol=rtol * 1e-3, record=False).final
        except PoleApproach as exc:
            return PeriodResult(None, dists, f"pole near t={exc.t_est:.6g}")
        except StepUnderflow as exc:
            return PeriodResult(None, dists, f"step underflow at t={exc.t:.6g}")
        cur = compare(y)
        d = max(abs(a - b) for a, b in zip(cur, ref)) / norm
        dists.append(d)
        if d <= tol:
            return PeriodResult(n, dists)
    return PeriodResult(None, dists, "no return within max_multiple")


def measure_period(isys: IsochronousSystem, x0: Sequence[complex], max_multiple: int = 24, tol: float = 1e-6,
                   rtol: float = 1e-11) -> PeriodResult:
    """Smallest ``n`` with ``|xt(nT) - xt(0)| <= tol |xt(0)|``."""
    return _return_periods(isys.rhs(), x0, isys.period, max_multiple, tol, lambda y: y, rtol)


# -- Newtonian reduction ----------------------------------------------------------------


@dataclass(frozen=True)
class NewtonSystem:
    """``z'' = -A^2 z^k``."""

    k: Fraction
    A: Optional[Fraction] = None
    family: Optional[str] = None  # "odd": k = -(2n+1)/(2n-1); "unit": k = -(n-1)/n
    n: Optional[int] = None

    @property
    def A2(self) -> complex:
        A = self.A if self.A is not None else Fraction(2) / (1 - self.k)
        return complex(A) ** 2

    def energy(self, z: complex, zdot: complex) -> complex:
        k = float(self.k)
        return zdot * zdot / 2 + self.A2 * complex(z) ** (k + 1) / (k + 1)


def _k_family(k: Fraction) -> tuple[Optional[str], Optional[int]]:
    # k = -(2n+1)/(2n-1)  <=>  n = (k - 1)/(2(k + 1))
    if k != -1:
        n = (k - 1) / (2 * (k + 1))
        if n.denominator == 1 and n > 0:
            return "odd", int(n)
    # k = -(n-1)/n  <=>  n = 1/(1 + k)
    if k != -1:
        n = 1 / (1 + k)
        if n.denominator == 1 and n > 0:
            return "unit", int(n)
    return None, None


def newton_reduce(A) -> NewtonSystem:
    A = GaussianRational.coerce(A)
    if not A or not A.is_real:
        raise ValueError("newton_reduce needs a nonzero real rational A")
    A = A.re
    k = 1 - 2 / A
    fam, n = _k_family(k)
    return NewtonSystem(k, A, fam, n)


def newton_from_k(k) -> NewtonSystem:
    k = Fraction(k)
    if k == 1:
        raise ValueError("k = 1 has no finite A")
    A = Fraction(2) / (1 - k)
    fam, n = _k_family(k)
    return NewtonSystem(k, A, fam, n)


@dataclass
class NewtonTrajectory:
    times: np.ndarray
    z: np.ndarray
    zdot: np.ndarray
    energy: np.ndarray
    route: str

    @property
    def energy_drift(self) -> float:
        e0 = self.energy[0]
        return float(np.max(np.abs(self.energy - e0)) / max(abs(e0), 1e-300))


def _energy_log(ns: NewtonSystem, logz: complex, v: complex) -> complex:
    k = float(ns.k)
    return v * v / 2 + ns.A2 * cmath.exp((k + 1) * logz) / (k + 1)


def newton_solve(ns: NewtonSystem, z0: complex, zdot0: complex, t_grid: Sequence[float], *,
                 route: str = "auto", rtol: float = 1e-12) -> NewtonTrajectory:
    """Solve ``z'' = -A^2 z^k`` on ``t_grid`` (starting at ``t = 0``)."""
    z0, zdot0 = complex(z0), complex(zdot0)
    if ns.k == -1:
        raise ValueError("k = -1 has a logarithmic potential")
    if z0 == 0:
        raise ValueError("z(0) = 0 is a singular point of the force")
    A = ns.A if ns.A is not None else Fraction(2) / (1 - ns.k)
    times = np.asarray(t_grid, dtype=complex)
    use_alg = route == "algebraic" or (route == "auto" and ns.family is not None)
    if use_alg:
        zs, vs = _newton_algebraic(A, z0, zdot0, times)
        logs = None
    else:
        zs, vs, logs = _newton_numeric(ns, z0, zdot0, times, rtol)
    if logs is not None:
        en = np.array([_energy_log(ns, l, v) for l, v in zip(logs, vs)])
    else:
        # powers continued along the trajectory through z itself
        en = np.array([_energy_log(ns, l, v) for l, v in zip(_continuous_log(zs), vs)])
    return NewtonTrajectory(times, zs, vs, en, "algebraic" if use_alg else "numeric")


def _continuous_log(zs) -> list[complex]:
    out = []
    prev = None
    for z in zs:
        if prev is None:
            cur = cmath.log(z)
        else:
            cur = prev[0] + cmath.log(z / prev[1])
        out.append(cur)
        prev = (cur, z)
    return out


def _newton_algebraic(A: Fraction, z0: complex, zdot0: complex, times: np.ndarray):
    # x1 = z^(-1/A), x2 = -z'/(A z)
    Af = float(A)
    x10 = cmath.exp(-cmath.log(z0) / Af)
    x20 = -zdot0 / (Af * z0)
    exps = exponents_from_AB(A, 0)
    sol = build_solution(exps, x10, x20)
    st0 = sol.branch_state
    s0 = st0.log1 + st0.log2
    nu = float(Fraction(exps.nu_plus.re))
    zs, vs = [], []
    states = track(sol, list(times))
    for st in states:
        # log x1 = log C - nu (log y+ + log y-), so z = z0 exp(A nu (S - S0))
        z = z0 * cmath.exp(Af * nu * (st.log1 + st.log2 - s0))
        x1, x2 = sol.state(st.w, st.log1, st.log2)
        zs.append(z)
        vs.append(-Af * z * x2)
    return np.array(zs), np.array(vs)


def _newton_numeric(ns: NewtonSystem, z0: complex, zdot0: complex, times: np.ndarray, rtol: float):
    k = float(ns.k)
    A2 = ns.A2

    def f(y):
        l, v = y
        return (v * cmath.exp(-l), -A2 * cmath.exp(k * l))

    ys = sample_path(f, (cmath.log(z0), zdot0), list(times), rtol=rtol, atol=rtol * 1e-3)
    logs = np.array([y[0] for y in ys])
    vs = np.array([y[1] for y in ys])
    return np.exp(logs), vs, logs


# -- A = -2 ------------------------------------------------------------------------------


@dataclass
class Case34Report:
    residual: float  # max |z'' + 4 z^2| / max(|z''|, 4|z|^2) over the checked points
    times: np.ndarray  # trace times
    log_abs_x1_sq: np.ndarray  # ln |x1|^2 along the trace
    peaks: list  # (t, value) local maxima above median + ln 3
    median: float
    events: list = field(default_factory=list)

    @property
    def n_peaks(self) -> int:
        return len(self.peaks)


def count_peaks(times: np.ndarray, values: np.ndarray, factor: float = 3.0) -> tuple[list, float]:
    """Local maxima of ``values`` (a log trace) exceeding ``median + ln(factor)``."""
    med = float(np.median(values))
    thr = med + math.log(factor)
    peaks = []
    for i in range(1, len(values) - 1):
        if values[i] > thr and values[i] >= values[i - 1] and values[i] > values[i + 1]:
            peaks.append((float(times[i].real), float(values[i])))
    return peaks, med


def verify_case34(x10: complex, x20: complex, t_grid: Sequence[float], *, trace_end: float = 0.0,
                  h: float = 1e-2, rtol: float = 1e-11) -> Case34Report:
    """Check ``z = x1^2`` against ``z'' = -4 z^2`` and record a real-time ``ln|x1|^2`` trace."""
    f = Nor(-2, 0).system().rhs()
    y0 = (complex(x10), complex(x20))
    worst = 0.0
    # five-point second difference around each check time
    stencil = (-2, -1, 0, 1, 2)
    wts = (-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12)
    for t in t_grid:
        t = float(t)
        pts = [t + s * h for s in stencil]
        if pts[0] < 0:
            pts = [p - pts[0] for p in pts]
        order = sorted(range(5), key=lambda i: pts[i])
        vals = sample_path(f, y0, [0.0] + [pts[i] for i in order], rtol=rtol, atol=1e-16)[1:]
        zs = [0j] * 5
        for j, i in enumerate(order):
            zs[i] = vals[j][0] ** 2
        zdd = sum(w * z for w, z in zip(wts, zs)) / (h * h)
        zc = zs[2]
        worst = max(worst, abs(zdd + 4 * zc * zc) / max(abs(zdd), 4 * abs(zc) ** 2, 1e-300))
    times = np.array([0.0])
    trace = np.array([math.log(abs(y0[0]) ** 2)])
    peaks: list = []
    med = float(trace[0])
    events = []
    if trace_end > 0:
        try:
            traj = integrate_path(f, y0, TrajectoryPath([Line(0, trace_end)]), rtol=1e-9, atol=1e-14)
        except PoleApproach as exc:
            events.append(f"pole near t={exc.t_est}")
            traj = exc.trajectory
        times = traj.times.real
        states = traj.states
        trace = np.log(np.abs(states[:, 0]) ** 2)
        peaks, med = count_peaks(times, trace)
    return Case34Report(worst, times, trace, peaks, med, events)


# -- isochronous Newtonian equation ---------------------------------------------------


@dataclass(frozen=True)
class NewtonIsochronous:
    """``zt'' = i c1 w zt' + c2 w^2 zt + zt^k`` with ``c1 = (k+3)/(k-1)``, ``c2 = 2(k+1)/(k-1)^2``."""

    k: Fraction
    omega: float

    @property
    def c1(self) -> Fraction:
        return (self.k + 3) / (self.k - 1)

    @property
    def c2(self) -> Fraction:
        return 2 * (self.k + 1) / (self.k - 1) ** 2

    @property
    def alpha(self) -> Fraction:
        """Dressing exponent: ``zt(t) = exp(i alpha w t) zeta(tau)``."""
        return Fraction(2) / (self.k - 1)

    @property
    def period(self) -> float:
        return 2 * math.pi / self.omega

    def linear_roots(self) -> tuple[complex, complex]:
        """Roots of ``r^2 - i c1 w r - c2 w^2``: ``i w 2/(k-1)`` and ``i w (k+1)/(k-1)``."""
        w = self.omega
        return 1j * w * float(2 / (self.k - 1)), 1j * w * float((self.k + 1) / (self.k - 1))

    def rhs(self):
        """First-order form in ``(log zt, zt')`` so fractional powers stay continuous."""
        k = float(self.k)
        a = 1j * float(self.c1) * self.omega
        b = float(self.c2) * self.omega**2

        def f(y):
            l, v = y
            e = cmath.exp(l)
            return (v / e, a * v + b * e + cmath.exp(k * l))

        return f

    def to_json(self) -> dict:
        return {"k": str(self.k), "omega": self.omega, "c1": str(self.c1), "c2": str(self.c2),
                "alpha": str(self.alpha)}


def newton_isochronous(k, omega: float) -> NewtonIsochronous:
    k = Fraction(k)
    if k == 1:
        raise ValueError("k = 1 is excluded")
    if not omega > 0:
        raise ValueError("omega must be strictly positive")
    return NewtonIsochronous(k, float(omega))


def measure_newton_period(ni: NewtonIsochronous, z0: complex, zdot0: complex, max_multiple: int = 24,
                          tol: float = 1e-6, rtol: float = 1e-11) -> PeriodResult:
    y0 = (cmath.log(complex(z0)), complex(zdot0))
    return _return_periods(ni.rhs(), y0, ni.period, max_multiple, tol,
                           lambda y: (cmath.exp(y[0]), y[1]), rtol)
