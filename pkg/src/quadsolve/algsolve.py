"""Explicit algebraic solutions of solvable canonical systems.

Work in ``w = x2/x1`` with ``y_pm = 1 - u_pm w``. Along any solution

    x1 = C * y_+^(-nu_+) * y_-^(-nu_-),    x2 = w * x1,
    A C (t - t0) = F(w),                   F'(w) = y_+^(nu_+ - 1) * y_-^(nu_- - 1),

with ``F(0) = 0``. In the solvable cases ``F = G - G(0)`` where
``G = y_+^a * y_-^b * Q(w)`` for a polynomial ``Q`` and rational ``a, b``.
Raising ``G = L(t)`` to the common denominator ``m`` of ``a, b`` gives a
polynomial equation for ``w`` whose roots are tracked continuously in ``t``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import ComplexPoly, GaussianRational, RootFindingError, canonical_sqrt, poly_roots
from .canonical import (
    Exc3,
    LinearTransform,
    Nor,
    Uncoupled,
    orbit_member_numeric,
    orbit_transform,
)
from .classify import ExponentData, SolvabilityClass, classify, exponents_from_AB, u_plus_minus

log = logging.getLogger(__name__)

DEGREE_CAP = 512


class LogarithmicTerm(ArithmeticError):
    pass


class SingularLinearSystem(ArithmeticError):
    pass


class DegenerateInitialData(ValueError):
    pass


class BranchCollision(ArithmeticError):
    def __init__(self, message: str, t: complex):
        super().__init__(message)
        self.t = t


class SingularTime(ArithmeticError):
    def __init__(self, message: str, t: complex):
        super().__init__(message)
        self.t = t


class PoleAtSpecialPoint(ArithmeticError):
    pass


class NotSolvable(ValueError):
    """The verdict has no algebraic solver here (elliptic, exceptional, not covered...)."""


class DegreeCapExceeded(ValueError):
    pass


# -- antiderivatives --------------------------------------------------------------


@dataclass(frozen=True)
class BetaFinite:
    """``B_rho(nu, n) = sum_k coeff_k * rho^(nu + k)``; exact rational coefficients."""

    nu: Fraction
    n: int
    coeffs: tuple  # ((exponent, coefficient), ...)

    def __call__(self, rho: complex) -> complex:
        return sum(complex(c) * complex(rho) ** complex(e) for e, c in self.coeffs)


@dataclass(frozen=True)
class AnsatzForm:
    """``y_+^nu_+ * y_-^nu_- * Q(w)`` with ``d/dw`` equal to the time integrand."""

    Q: ComplexPoly
    nu_plus: Fraction
    nu_minus: Fraction


def beta_finite(nu_plus, n: int) -> BetaFinite:
    nu = Fraction(GaussianRational.coerce(nu_plus).re) if GaussianRational.coerce(nu_plus).is_real else None
    if nu is None:
        raise ValueError("beta_finite needs a real rational exponent")
    if n < 1:
        raise ValueError("n must be a positive integer")
    coeffs = []
    for k in range(n):
        e = nu + k
        if e == 0:
            raise LogarithmicTerm(f"exponent nu + {k} vanishes")
        coeffs.append((e, Fraction(math.comb(n - 1, k) * (-1) ** k) / e))
    return BetaFinite(nu, n, tuple(coeffs))


def _beta_Q(nu_a: Fraction, n: int, ua: complex, ub: complex) -> ComplexPoly:
    """Q with ``d/dw[y_a^nu_a Q] = y_a^(nu_a - 1) y_b^(n - 1)``, ``y = 1 - u w``."""
    bf = beta_finite(nu_a, n)
    c = -ub / (ua - ub)
    pref = -((ua - ub) ** (n - 1)) / ua**n
    ya = ComplexPoly([1, -ua])
    Q = ComplexPoly([0])
    for k, (_, coef) in enumerate(bf.coeffs):
        Q = Q + (ya**k) * (complex(coef) * c**k * pref)
    return Q


def ansatz_antiderivative(nu_plus, nu_minus, u_plus, u_minus) -> AnsatzForm:
    p, m = Fraction(nu_plus), Fraction(nu_minus)
    s = p + m
    if s.denominator != 1 or s >= 0:
        raise ValueError("ansatz needs nu_+ + nu_- = -n with n >= 1")
    n = int(-s)
    up, um = complex(u_plus), complex(u_minus)
    y1 = ComplexPoly([1, -up])
    y2 = ComplexPoly([1, -um])
    y12 = y1 * y2
    cols = []
    for j in range(n + 1):
        wj = ComplexPoly([0] * j + [1])
        dwj = ComplexPoly([0] * (j - 1) + [j]) if j else ComplexPoly([0])
        e = y2 * wj * (-float(p) * up) + y1 * wj * (-float(m) * um) + y12 * dwj
        cols.append(e.coeffs + [0j] * (n + 2 - len(e.coeffs)))
    M = np.array(cols, dtype=complex).T
    rhs = np.zeros(n + 2, dtype=complex)
    rhs[0] = 1
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    resid = np.abs(M @ sol - rhs).max()
    if not np.all(np.isfinite(sol)) or resid > 1e-9 * max(1.0, np.abs(M).max() * np.abs(sol).max()):
        raise SingularLinearSystem(f"ansatz system has no polynomial solution (residual {resid:.3g})")
    return AnsatzForm(ComplexPoly(sol), p, m)


# -- the solution object -------------------------------------------------------------


@dataclass
class BranchState:
    t: complex
    w: complex
    log1: complex  # continuous log of y_+ = 1 - u_+ w
    log2: complex  # continuous log of y_- = 1 - u_- w
    roots: list = field(default_factory=list)
    index: int = 0


@dataclass
class AlgebraicSolution:
    exponents: ExponentData
    A: complex
    B: complex
    C: complex
    t0: complex
    antiderivative: object
    a: Fraction  # exponent of y_+ in G
    b: Fraction  # exponent of y_- in G
    Q: ComplexPoly
    m_common: int
    branch_state: BranchState
    K1: ComplexPoly
    K2: ComplexPoly

    @property
    def u_plus(self) -> complex:
        return complex(self.exponents.u_plus)

    @property
    def u_minus(self) -> complex:
        return complex(self.exponents.u_minus)

    @property
    def nu(self) -> tuple[float, float]:
        return float(Fraction(self.exponents.nu_plus.re)), float(Fraction(self.exponents.nu_minus.re))

    @property
    def Q0(self) -> complex:
        return self.Q(0)

    @property
    def AC(self) -> complex:
        return self.A * self.C

    def L(self, t: complex) -> complex:
        return self.AC * (t - self.t0) + self.Q0

    def G(self, w: complex, log1: complex, log2: complex) -> complex:
        return cmath.exp(float(self.a) * log1 + float(self.b) * log2) * self.Q(w)

    def integrand(self, log1: complex, log2: complex) -> complex:
        np_, nm = self.nu
        return cmath.exp((np_ - 1) * log1 + (nm - 1) * log2)

    def state(self, w: complex, log1: complex, log2: complex) -> tuple[complex, complex]:
        np_, nm = self.nu
        x1 = self.C * cmath.exp(-np_ * log1 - nm * log2)
        return x1, w * x1

    def to_json(self) -> dict:
        enc = lambda z: [complex(z).real, complex(z).imag]
        return {
            "A": enc(self.A),
            "B": enc(self.B),
            "C": enc(self.C),
            "t0": enc(self.t0),
            "exponents": self.exponents.to_json(),
            "G_exponents": [str(self.a), str(self.b)],
            "Q": [enc(c) for c in self.Q.coeffs],
            "m_common": self.m_common,
            "relation_degree": time_relation_poly(self, self.t0).degree,
        }


def _real_fraction(x) -> Fraction:
    g = GaussianRational.coerce(x)
    if not g.is_real:
        raise NotSolvable("complex rational exponents give infinitely many sheets; use the oracle")
    return g.re


def constants_from_initial(exps: ExponentData, x10: complex, x20: complex) -> tuple[complex, complex]:
    """``(C, t0)`` for the canonical system with exponents ``exps``.

    ``C`` uses principal powers at ``w0 = x2(0)/x1(0)``; ``t0`` follows from the
    antiderivative evaluated with the same powers.
    """
    sol = build_solution(exps, x10, x20)
    return sol.C, sol.t0


def _pieces(exps: ExponentData):
    """Return ``(a, b, Q)`` with ``G = y_+^a y_-^b Q``."""
    p, m = _real_fraction(exps.nu_plus), _real_fraction(exps.nu_minus)
    up, um = complex(exps.u_plus), complex(exps.u_minus)
    if m.denominator == 1 and m > 0:
        return p, Fraction(0), _beta_Q(p, int(m), up, um)
    if p.denominator == 1 and p > 0:
        return Fraction(0), m, _beta_Q(m, int(p), um, up)
    s = p + m
    if s.denominator == 1 and s < 0:
        return p, m, ansatz_antiderivative(p, m, up, um).Q
    raise NotSolvable(f"no finite antiderivative for exponents ({p}, {m})")


def build_solution(exps: ExponentData, x10: complex, x20: complex) -> AlgebraicSolution:
    x10, x20 = complex(x10), complex(x20)
    if x10 == 0:
        raise DegenerateInitialData("x1(0) = 0 lies on the invariant line u = 0")
    A = complex(exps.A)
    B = exps.B
    up, um = complex(exps.u_plus), complex(exps.u_minus)
    w0 = x20 / x10
    y10, y20 = 1 - up * w0, 1 - um * w0
    scale = 1 + abs(w0) * max(abs(up), abs(um))
    if abs(y10) < 1e-12 * scale or abs(y20) < 1e-12 * scale:
        raise DegenerateInitialData("u(0) coincides with u_+ or u_-")
    a, b, Q = _pieces(exps)
    np_, nm = float(_real_fraction(exps.nu_plus)), float(_real_fraction(exps.nu_minus))
    l1, l2 = cmath.log(y10), cmath.log(y20)
    C = x10 * cmath.exp(np_ * l1 + nm * l2)
    G0 = cmath.exp(float(a) * l1 + float(b) * l2) * Q(w0)
    t0 = (Q(0) - G0) / (A * C)
    mc = math.lcm(a.denominator, b.denominator)
    p1, p2 = int(a * mc), int(b * mc)
    n1, n2 = max(0, -p1), max(0, -p2)
    y1 = ComplexPoly([1, -up])
    y2 = ComplexPoly([1, -um])
    K1 = (y1**n1) * (y2**n2)
    K2 = (y1 ** (p1 + n1)) * (y2 ** (p2 + n2)) * (Q**mc)
    deg = max(K1.degree, K2.degree)
    if deg > DEGREE_CAP:
        raise DegreeCapExceeded(f"time relation has degree {deg} > {DEGREE_CAP}")
    state = BranchState(0j, w0, l1, l2)
    antider = AnsatzForm(Q, a, b) if b != 0 and a != 0 else beta_finite(a if b == 0 else b, _n_int(exps))
    return AlgebraicSolution(exps, A, B, C, t0, antider, a, b, Q, mc, state, K1, K2)


def _n_int(exps: ExponentData) -> int:
    p, m = _real_fraction(exps.nu_plus), _real_fraction(exps.nu_minus)
    return int(m) if (m.denominator == 1 and m > 0) else int(p)


def time_relation_poly(sol: AlgebraicSolution, t: complex) -> ComplexPoly:
    """Polynomial in ``w = 1/u`` whose roots are the candidate ``w(t)`` on all sheets."""
    return sol.K1 * (sol.L(t) ** sol.m_common) - sol.K2


def R_of_u(sol: AlgebraicSolution, u: complex) -> complex:
    """``x2 = R(u)`` with powers continued from the recorded branch state."""
    u = complex(u)
    if u == 0:
        raise PoleAtSpecialPoint("u = 0")
    w = 1 / u
    st = sol.branch_state
    y1, y2 = 1 - sol.u_plus * w, 1 - sol.u_minus * w
    if abs(y1) < 1e-14 or abs(y2) < 1e-14:
        raise PoleAtSpecialPoint("u hits u_+ or u_-")
    l1 = st.log1 + cmath.log(y1 / (1 - sol.u_plus * st.w))
    l2 = st.log2 + cmath.log(y2 / (1 - sol.u_minus * st.w))
    return sol.state(w, l1, l2)[1]


def first_integral(exps: ExponentData, states: Sequence[Sequence[complex]]) -> np.ndarray:
    """``x1 * y_+^nu_+ * y_-^nu_-`` along a sampled trajectory, powers continued sample to sample.

    Equivalent to ``x1^(1 - nu_+ - nu_-) (x1 - u_+ x2)^nu_+ (x1 - u_- x2)^nu_-``.
    """
    up, um = complex(exps.u_plus), complex(exps.u_minus)
    np_, nm = complex(exps.nu_plus), complex(exps.nu_minus)
    out = []
    l1 = l2 = None
    p1 = p2 = None
    for x1, x2 in states:
        w = x2 / x1
        y1, y2 = 1 - up * w, 1 - um * w
        if l1 is None:
            l1, l2 = cmath.log(y1), cmath.log(y2)
        else:
            l1 += cmath.log(y1 / p1)
            l2 += cmath.log(y2 / p2)
        p1, p2 = y1, y2
        out.append(x1 * cmath.exp(np_ * l1 + nm * l2))
    return np.array(out)


# -- tracking -------------------------------------------------------------------------


def _try_step(sol: AlgebraicSolution, st: BranchState, t_new: complex, rel_tol: float) -> BranchState | None:
    h = t_new - st.t
    f = sol.integrand(st.log1, st.log2)
    pred = st.w + h * sol.AC / f
    P = time_relation_poly(sol, t_new)
    if P.degree < 1:
        raise SingularTime("time relation degenerates", t_new)
    init = st.roots if len(st.roots) == P.degree else None
    try:
        roots = poly_roots(P, 1e-13, init=init)
    except RootFindingError:
        return None
    dists = sorted((abs(r - pred), i) for i, r in enumerate(roots))
    d1, i1 = dists[0]
    if len(dists) > 1 and d1 > 0.1 * dists[1][0]:
        return None
    w = roots[i1]
    if abs(w) > 1e12 * (1 + abs(st.w)):
        raise SingularTime("w runs to infinity (x1 -> 0 with x2 unbounded)", t_new)
    y1o, y2o = 1 - sol.u_plus * st.w, 1 - sol.u_minus * st.w
    y1, y2 = 1 - sol.u_plus * w, 1 - sol.u_minus * w
    r1, r2 = y1 / y1o, y2 / y2o
    if abs(r1 - 1) >= 0.5 or abs(r2 - 1) >= 0.5:
        return None
    l1, l2 = st.log1 + cmath.log(r1), st.log2 + cmath.log(r2)
    Lt = sol.L(t_new)
    G = sol.G(w, l1, l2)
    if abs(G - Lt) > rel_tol * max(1.0, abs(Lt), abs(sol.Q0)):
        return None
    return BranchState(t_new, w, l1, l2, roots, i1)


def _near_singular(sol: AlgebraicSolution, st: BranchState) -> bool:
    y1, y2 = 1 - sol.u_plus * st.w, 1 - sol.u_minus * st.w
    return min(abs(y1), abs(y2)) < 1e-9


def track(sol: AlgebraicSolution, t_targets: Sequence[complex], *, max_depth: int = 40, rel_tol: float = 1e-7,
          h_max: float | None = None) -> list[BranchState]:
    """Continue the tracked root along straight segments through ``t_targets``."""
    st = sol.branch_state
    if not st.roots:
        st.roots = poly_roots(time_relation_poly(sol, st.t), 1e-13)
    out = []
    step = h_max if h_max else math.inf
    for target in t_targets:
        target = complex(target)
        while st.t != target:
            remaining = target - st.t
            h = min(step, abs(remaining))
            t_new = target if h >= abs(remaining) else st.t + remaining * (h / abs(remaining))
            new = _try_step(sol, st, t_new, rel_tol)
            if new is None:
                step = h / 2
                if step < 2.0**-max_depth * (1 + abs(st.t)):
                    if _near_singular(sol, st):
                        raise SingularTime("trajectory runs into u = u_pm", st.t)
                    raise BranchCollision("cannot separate the tracked root from its neighbours", st.t)
                continue
            st = new
            if _near_singular(sol, st):
                raise SingularTime("trajectory runs into u = u_pm", st.t)
            step = min(2 * h, h_max) if h_max else 2 * h
        out.append(st)
    sol.branch_state = st
    return out


# -- entry points ------------------------------------------------------------------------


def u_plus_minus_of(form: Nor) -> tuple[complex, complex]:
    return u_plus_minus(form.A, form.B)


@dataclass
class Plan:
    """How a canonical system is solved: possibly through an orbit member."""

    verdict: SolvabilityClass
    exponents: ExponentData
    transform: Optional[LinearTransform]  # x = T y, y solving the member system


def plan_for(form: Nor) -> Plan:
    verdict = classify(form)
    if not verdict.is_case:
        raise NotSolvable(f"{verdict} has no algebraic time relation here")
    if verdict.finite_sheets is False:
        raise NotSolvable("complex rational exponents give infinitely many sheets; use the oracle")
    A, Bsq = GaussianRational.coerce(form.A), GaussianRational.coerce(form.Bsq)
    if verdict.via is None or verdict.via == (A, Bsq):
        return Plan(verdict, exponents_from_AB(A, Bsq, form.Bsign), None)
    Am, Bm2 = verdict.via
    B = form.B
    for s1 in (1, -1):
        for s2 in (1, -1):
            Ap, Bp = orbit_member_numeric(form.A, form.Bsq, s1, s2, B)
            if abs(Ap - complex(Am)) < 1e-9 and abs(Bp * Bp - complex(Bm2)) < 1e-9:
                sign = 1 if abs(Bp - canonical_sqrt(complex(Bm2))) <= abs(Bp + canonical_sqrt(complex(Bm2))) else -1
                T = orbit_transform(form.A, B, s1, s2)
                return Plan(verdict, exponents_from_AB(Am, Bm2, sign), T)
    raise NotSolvable("could not locate the orbit member transform")


def solve_ivp(form, x10: complex, x20: complex, t_grid: Sequence[complex], **kw) -> list[tuple[complex, complex]]:
    """Evaluate the algebraic solution at each grid time (ordered path from t = 0)."""
    if isinstance(form, (Exc3, Uncoupled)):
        return [exc_solve(form, x10, x20, t) for t in t_grid]
    if not isinstance(form, Nor):
        raise NotSolvable(f"no algebraic solver for {type(form).__name__}")
    plan = plan_for(form)
    y10, y20 = (x10, x20) if plan.transform is None else plan.transform.solve((x10, x20))
    sol = build_solution(plan.exponents, y10, y20)
    states = track(sol, list(t_grid), **kw)
    out = [sol.state(s.w, s.log1, s.log2) for s in states]
    if plan.transform is not None:
        out = [plan.transform.apply(y) for y in out]
    return out


def solve_nu_minus_one(exps: ExponentData, x10: complex, x20: complex, t_grid: Sequence[complex]):
    """Closed-form path for ``nu_- = 1``: ``y_+^nu_+ = 1 - u_+ nu_+ A C (t - t0)``."""
    p, m = _real_fraction(exps.nu_plus), _real_fraction(exps.nu_minus)
    if m != 1:
        if p == 1:
            exps = ExponentData(exps.A, exps.Bsq, exps.Bsign, exps.nu_minus, exps.nu_plus,
                                exps.u_minus, exps.u_plus, exps.rational)
            p = m
        else:
            raise ValueError("needs an exponent equal to 1")
    sol = build_solution(exps, x10, x20)
    up, um = sol.u_plus, sol.u_minus
    k = up * float(p) * sol.AC
    base = lambda t: 1 - k * (t - sol.t0)
    b_prev = base(0)
    lb = float(p) * sol.branch_state.log1  # log of y_+^nu_+ at t = 0
    out = []
    for t in t_grid:
        b = base(complex(t))
        if b == 0:
            raise SingularTime("base of the closed form vanishes", t)
        lb += cmath.log(b / b_prev)
        b_prev = b
        y1 = cmath.exp(lb / float(p))
        w = (1 - y1) / up
        y2 = 1 - um * w
        x1 = sol.C / (b * y2)
        out.append((x1, w * x1))
    return out


def branch_times(sol: AlgebraicSolution) -> list[complex]:
    """Times where two roots of the time relation meet (critical values of ``K2/K1``)."""
    N, D = sol.K2, sol.K1
    crit = N.deriv() * D - N * D.deriv()
    if crit.degree < 1:
        return []
    out = []
    for w in poly_roots(crit, 1e-13):
        d = D(w)
        if abs(d) < 1e-12:
            continue
        val = N(w) / d
        mc = sol.m_common
        r = abs(val) ** (1.0 / mc)
        th = cmath.phase(val)
        for k in range(mc):
            L = r * cmath.exp(1j * (th + 2 * math.pi * k) / mc)
            t = sol.t0 + (L - sol.Q0) / sol.AC
            if not any(abs(t - o) < 1e-9 * (1 + abs(t)) for o in out):
                out.append(t)
    return out


def exc_solve(form, x10: complex, x20: complex, t: complex) -> tuple[complex, complex]:
    x10, x20, t = complex(x10), complex(x20), complex(t)
    if isinstance(form, Uncoupled):
        return x10 / (1 - form.sigma1 * x10 * t), x20 / (1 - form.sigma2 * x20 * t)
    if isinstance(form, Exc3):
        B = complex(form.B)
        kappa = x20 - B * x10
        if x10 == 0:
            return 0j, x20
        if abs(kappa * t) < 1e-8:
            # series of the general formula about kappa = 0
            v = 1 / x10 - B * t - kappa * t / x10 + kappa * B * t * t / 2
            x1 = 1 / v
        else:
            v = (1 / x10 + B / kappa) * cmath.exp(-kappa * t) - B / kappa
            x1 = 1 / v
        return x1, kappa + B * x1
    raise NotSolvable(f"exc_solve handles Exc3 and Uncoupled, not {type(form).__name__}")
