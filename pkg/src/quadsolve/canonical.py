"""Linear reduction of a general quadratic system to a canonical representative.

A system ``x1' = c11 x1^2 + c12 x2^2 + c13 x1 x2``,
``x2' = c21 x1^2 + c22 x2^2 + c23 x1 x2`` is reduced by picking an invariant
line ``l(x) = 0`` (a zero of the ratio cubic), writing ``l' = l * m`` and
taking ``(l, m)`` as new coordinates. A final rescaling of ``l`` gives

    Nor:        y1' = y1 y2,  y2' = A (y1^2 + y2^2) + B y1 y2
    Exc1:       y1' = y1 y2,  y2' = y1^2 + B y1 y2
    Exc2:       y1' = y1 y2,  y2' = A y2^2 + sigma y1 y2
    Exc3:       y1' = y1 y2,  y2' = B y1 y2
    Uncoupled:  y1' = sigma1 y1^2,  y2' = sigma2 y2^2
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .algebra import (
    ComplexPoly,
    GaussianRational,
    QuadExtValue,
    canonical_sqrt,
    poly_roots,
    rational_sqrt,
    to_exact,
)

Number = Union[GaussianRational, complex]

__all__ = [
    "GeneralSystem",
    "LinearTransform",
    "Nor",
    "Exc1",
    "Exc2",
    "Exc3",
    "Uncoupled",
    "CanonicalForm",
    "ZeroSystem",
    "NumericallyDegenerate",
    "IrreducibleSystem",
    "DegenerateOrbit",
    "cubic_of_ratio",
    "cubic_of_ratio_exact",
    "reduce_to_canonical",
    "Reduction",
    "equivalence_orbit",
    "orbit_transform",
    "orbit_member_numeric",
    "canonical_system",
]


class ZeroSystem(ValueError):
    pass


class NumericallyDegenerate(ArithmeticError):
    """Zeros of the ratio cubic coincide within tolerance but not exactly."""


class IrreducibleSystem(ValueError):
    """No invariant line gives one of the listed canonical forms."""


class DegenerateOrbit(ArithmeticError):
    pass


def _as_number(x) -> Number:
    ex = to_exact(x)
    if ex is not None:
        return ex
    return complex(x)


@dataclass(frozen=True)
class GeneralSystem:
    """Coefficients of the six-parameter homogeneous quadratic system."""

    c11: Number
    c12: Number
    c13: Number
    c21: Number
    c22: Number
    c23: Number

    def __post_init__(self):
        vals = [_as_number(getattr(self, k)) for k in self.names()]
        if all(isinstance(v, GaussianRational) for v in vals) or not any(isinstance(v, GaussianRational) for v in vals):
            pass
        else:
            vals = [complex(v) for v in vals]
        for k, v in zip(self.names(), vals):
            object.__setattr__(self, k, v)
        if all(complex(v) == 0 for v in vals):
            raise ZeroSystem("all six coefficients vanish")

    @staticmethod
    def names() -> tuple[str, ...]:
        return ("c11", "c12", "c13", "c21", "c22", "c23")

    @property
    def coeffs(self) -> tuple[Number, ...]:
        return tuple(getattr(self, k) for k in self.names())

    @property
    def is_exact(self) -> bool:
        return isinstance(self.c11, GaussianRational)

    def numeric(self) -> tuple[complex, ...]:
        return tuple(complex(c) for c in self.coeffs)

    def exact_coeffs(self) -> tuple[GaussianRational, ...]:
        """Coefficients as exact values (floats are converted without rounding)."""
        return tuple(GaussianRational.coerce(c) for c in self.coeffs)

    def rhs(self):
        c11, c12, c13, c21, c22, c23 = self.numeric()

        def f(y):
            x1, x2 = y
            return (
                c11 * x1 * x1 + c12 * x2 * x2 + c13 * x1 * x2,
                c21 * x1 * x1 + c22 * x2 * x2 + c23 * x1 * x2,
            )

        return f

    def transformed(self, T) -> "GeneralSystem":
        """System satisfied by ``y`` when ``x = T y``.

        ``T`` is a LinearTransform or a 2x2 nested sequence; exact entries keep the
        result exact for an exact system.
        """
        (a, b), (c, d) = T.matrix.tolist() if isinstance(T, LinearTransform) else T
        exact = self.is_exact and all(to_exact(v) is not None for v in (a, b, c, d))
        if exact:
            a, b, c, d = (to_exact(v) for v in (a, b, c, d))
            co = self.coeffs
        else:
            a, b, c, d = (complex(v) for v in (a, b, c, d))
            co = self.numeric()
        det = a * d - b * c

        def quad(q11, q22, q12):
            # q(x) at x = T y, returned as (y1^2, y2^2, y1 y2) coefficients
            return (
                q11 * a * a + q22 * c * c + q12 * a * c,
                q11 * b * b + q22 * d * d + q12 * b * d,
                q11 * 2 * a * b + q22 * 2 * c * d + q12 * (a * d + b * c),
            )

        f1 = quad(co[0], co[1], co[2])
        f2 = quad(co[3], co[4], co[5])
        g1 = [(d * u - b * v) / det for u, v in zip(f1, f2)]
        g2 = [(a * v - c * u) / det for u, v in zip(f1, f2)]
        return GeneralSystem(*g1, *g2)

    @classmethod
    def canonical(cls, A, B) -> "GeneralSystem":
        return cls(0, 0, 1, A, A, B)

    def to_json(self) -> dict:
        return {"general": {k: _num_json(getattr(self, k)) for k in self.names()}}


def _num_json(v: Number):
    if isinstance(v, GaussianRational):
        return str(v)
    v = complex(v)
    return [v.real, v.imag]


@dataclass(frozen=True)
class LinearTransform:
    """``x = T y`` with ``T = [[a11, a12], [a21, a22]]``."""

    a11: complex
    a12: complex
    a21: complex
    a22: complex

    def __post_init__(self):
        if abs(self.det) == 0:
            raise ValueError("singular linear transform")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=complex)

    @property
    def det(self) -> complex:
        return complex(self.a11) * complex(self.a22) - complex(self.a12) * complex(self.a21)

    def apply(self, y: Sequence[complex]) -> tuple[complex, complex]:
        y1, y2 = complex(y[0]), complex(y[1])
        return (complex(self.a11) * y1 + complex(self.a12) * y2, complex(self.a21) * y1 + complex(self.a22) * y2)

    def inverse(self) -> "LinearTransform":
        d = self.det
        return LinearTransform(
            complex(self.a22) / d, -complex(self.a12) / d, -complex(self.a21) / d, complex(self.a11) / d
        )

    def solve(self, x: Sequence[complex]) -> tuple[complex, complex]:
        return self.inverse().apply(x)

    def compose(self, other: "LinearTransform") -> "LinearTransform":
        m = self.matrix @ other.matrix
        return LinearTransform(*m.ravel())

    def to_json(self) -> list:
        return [[[complex(v).real, complex(v).imag] for v in row] for row in self.matrix.tolist()]


IDENTITY = LinearTransform(1, 0, 0, 1)


@dataclass(frozen=True)
class Nor:
    A: Number
    Bsq: Number
    Bsign: int = 1

    kind = "nor"

    def __post_init__(self):
        object.__setattr__(self, "A", _as_number(self.A))
        object.__setattr__(self, "Bsq", _as_number(self.Bsq))
        if complex(self.A) == 0:
            raise ValueError("Nor requires A != 0; use Exc3")
        if self.Bsign not in (1, -1):
            raise ValueError("Bsign must be +1 or -1")

    @property
    def B(self) -> complex:
        return self.Bsign * canonical_sqrt(complex(self.Bsq))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.A, GaussianRational) and isinstance(self.Bsq, GaussianRational)

    def system(self) -> GeneralSystem:
        B = self.B
        exact_B = rational_sqrt(self.Bsq) if isinstance(self.Bsq, GaussianRational) else None
        if exact_B is not None and isinstance(self.A, GaussianRational):
            return GeneralSystem.canonical(self.A, exact_B * self.Bsign)
        return GeneralSystem.canonical(complex(self.A), B)

    def to_json(self) -> dict:
        return {"form": "nor", "A": _num_json(self.A), "B2": _num_json(self.Bsq), "Bsign": self.Bsign}


@dataclass(frozen=True)
class Exc1:
    B: Number
    kind = "exc1"

    def system(self) -> GeneralSystem:
        return GeneralSystem(0, 0, 1, 1, 0, self.B)

    def to_json(self) -> dict:
        return {"form": "exc1", "B": _num_json(self.B)}


@dataclass(frozen=True)
class Exc2:
    A: Number
    sigma: int
    kind = "exc2"

    def __post_init__(self):
        if self.sigma not in (0, 1):
            raise ValueError("Exc2 sigma must be 0 or 1")

    def system(self) -> GeneralSystem:
        return GeneralSystem(0, 0, 1, 0, self.A, self.sigma)

    def to_json(self) -> dict:
        return {"form": "exc2", "A": _num_json(self.A), "sigma": self.sigma}


@dataclass(frozen=True)
class Exc3:
    B: Number
    kind = "exc3"

    def system(self) -> GeneralSystem:
        return GeneralSystem(0, 0, 1, 0, 0, self.B)

    def to_json(self) -> dict:
        return {"form": "exc3", "B": _num_json(self.B)}


@dataclass(frozen=True)
class Uncoupled:
    sigma1: int
    sigma2: int
    kind = "uncoupled"

    def system(self) -> GeneralSystem:
        return GeneralSystem(self.sigma1, 0, 0, 0, self.sigma2, 0)

    def to_json(self) -> dict:
        return {"form": "uncoupled", "sigma1": self.sigma1, "sigma2": self.sigma2}


CanonicalForm = Union[Nor, Exc1, Exc2, Exc3, Uncoupled]


def canonical_system(form: CanonicalForm) -> GeneralSystem:
    return form.system()


# -- ratio cubic --------------------------------------------------------------


def cubic_of_ratio_exact(sys: GeneralSystem) -> list[GaussianRational]:
    """Ascending coefficients of P3(u) with u' = -x2 P3(u), exactly."""
    c11, c12, c13, c21, c22, c23 = sys.exact_coeffs()
    return [-c12, -(c13 - c22), -(c11 - c23), c21]


def cubic_of_ratio(sys: GeneralSystem) -> ComplexPoly:
    c11, c12, c13, c21, c22, c23 = sys.numeric()
    return ComplexPoly([-c12, -(c13 - c22), -(c11 - c23), c21])


def _trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _peval(p: Sequence, x):
    acc = GaussianRational(0) if isinstance(x, GaussianRational) else 0j
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pderiv(p: Sequence) -> list:
    return [c * k for k, c in enumerate(p)][1:]


def _pmod(a: list, b: list) -> list:
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and a:
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] = a[i + shift] - factor * c
        a = _trim(a[:-1] + [a[-1]]) if a[-1] else _trim(a)
    return a


def _pgcd(a: list, b: list) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(a, b)
    return [c / a[-1] for c in a] if a else a


def _recognize(z: complex, p: list, bound: int = 10**6) -> GaussianRational | None:
    cand = GaussianRational(
        Fraction(z.real).limit_denominator(bound), Fraction(z.imag).limit_denominator(bound)
    )
    return cand if not _peval(p, cand) else None


@dataclass
class _Line:
    lam: tuple  # linear form coefficients (l1, l2)
    multiplicity: int
    exact: bool
    label: str


def _invariant_lines(sys: GeneralSystem, tol: float) -> tuple[list[_Line], bool]:
    """Invariant lines through the origin; second value flags P3 == 0."""
    P = _trim(cubic_of_ratio_exact(sys))
    if not P:
        one, zero = GaussianRational(1), GaussianRational(0)
        lines = [_Line((one, zero), 0, True, "x1"), _Line((zero, one), 0, True, "x2")]
        return lines, True
    deg = len(P) - 1
    lines: list[_Line] = []
    if deg < 3:
        one, zero = GaussianRational(1), GaussianRational(0)
        lines.append(_Line((zero, one), 3 - deg, True, "inf"))
    if deg >= 1:
        g = _pgcd(P, _pderiv(P))
        repeated: list[tuple[GaussianRational, int]] = []
        if len(g) > 1:
            # repeated zeros are zeros of g; deg P <= 3 so g is linear or a perfect square
            if len(g) == 2:
                r = -g[0] / g[1]
                mult = 3 if len(P) == 4 and len(_pgcd(g, _pderiv(P))) == 2 and not _peval(_pderiv(_pderiv(P)), r) else 2
                repeated.append((r, mult))
            else:
                r = -g[1] / (2 * g[2])
                repeated.append((r, 3))
        for r, mult in repeated:
            lines.append(_Line((GaussianRational(1), -r), mult, True, f"u={r}"))
        remaining = deg - sum(m for _, m in repeated)
        if remaining > 0:
            num = ComplexPoly([complex(c) for c in P])
            roots = poly_roots(num, 1e-13)
            for r, _ in repeated:
                rc = complex(r)
                for _ in range(len([1 for rr, mm in repeated if rr == r for _ in range(mm)])):
                    pass
            # discard numeric copies of the exactly known repeated zeros
            simple = list(roots)
            for r, mult in repeated:
                rc = complex(r)
                for _ in range(mult):
                    j = min(range(len(simple)), key=lambda k: abs(simple[k] - rc))
                    simple.pop(j)
            for i, z in enumerate(simple):
                for j in range(i):
                    if abs(z - simple[j]) <= tol * max(1.0, abs(z)):
                        raise NumericallyDegenerate(
                            f"zeros {simple[j]:.6g} and {z:.6g} of the ratio cubic coincide within tol={tol:g}"
                        )
                for r, _ in repeated:
                    if abs(z - complex(r)) <= tol * max(1.0, abs(z)):
                        raise NumericallyDegenerate("a simple zero of the ratio cubic nearly coincides with a repeated one")
            for z in simple:
                ex = _recognize(z, P) if sys.is_exact else None
                if ex is not None:
                    lines.append(_Line((GaussianRational(1), -ex), 1, True, f"u={ex}"))
                else:
                    lines.append(_Line((1 + 0j, -z), 1, False, f"u={z:.12g}"))
    return lines, False


def _quad_of(sys_coeffs, lam):
    """Coefficients (x1^2, x2^2, x1x2) of l1*f1 + l2*f2."""
    c11, c12, c13, c21, c22, c23 = sys_coeffs
    l1, l2 = lam
    return (l1 * c11 + l2 * c21, l1 * c12 + l2 * c22, l1 * c13 + l2 * c23)


def _subst(g, N):
    """Quadratic form g (x1^2, x2^2, x1x2) under x = N z."""
    g11, g22, g12 = g
    (n11, n12), (n21, n22) = N
    z11 = g11 * n11 * n11 + g22 * n21 * n21 + g12 * n11 * n21
    z22 = g11 * n12 * n12 + g22 * n22 * n22 + g12 * n12 * n22
    z12 = 2 * g11 * n11 * n12 + 2 * g22 * n21 * n22 + g12 * (n11 * n22 + n12 * n21)
    return z11, z22, z12


def _is_zero(v, tol) -> bool:
    if isinstance(v, GaussianRational):
        return not v
    return abs(v) <= tol


@dataclass
class Reduction:
    form: CanonicalForm
    transform: LinearTransform
    exact: bool
    line: str
    degenerate_pattern: str | None = None
    candidates: list = field(default_factory=list)


def _reduce_with_line(coeffs, line: _Line, tol: float):
    lam = line.lam
    exact = line.exact and isinstance(coeffs[0], GaussianRational)
    if not exact:
        coeffs = tuple(complex(c) for c in coeffs)
        lam = (complex(lam[0]), complex(lam[1]))
    zero = GaussianRational(0) if exact else 0j
    l1, l2 = lam
    a, b, c = _quad_of(coeffs, lam)
    # l' = l * m with m = p x1 + q x2
    if not _is_zero(l1, 0) and not _is_zero(l2, 0):
        p, q = a / l1, b / l2
    elif _is_zero(l2, 0):
        p, q = a / l1, c / l1
    else:
        p, q = c / l2, b / l2
    det = l1 * q - l2 * p
    scale = max(abs(complex(x)) for x in (l1, l2, p, q, 1))
    if _is_zero(det, tol * scale * scale):
        # rate is proportional to the line itself: y' = alpha y^2
        alpha = p / l1 if not _is_zero(l1, 0) else q / l2
        return None, alpha
    N = ((q / det, -l2 / det), (-p / det, l1 / det))
    mq = (p * coeffs[0] + q * coeffs[3], p * coeffs[1] + q * coeffs[4], p * coeffs[2] + q * coeffs[5])
    a1, a2, bb = _subst(mq, N)
    cscale = max(abs(complex(x)) for x in (*coeffs, 1)) * max(1.0, abs(complex(p)), abs(complex(q))) * max(
        abs(complex(x)) for row in N for x in row
    ) ** 2
    ztol = tol * cscale
    a1z, a2z = _is_zero(a1, ztol), _is_zero(a2, ztol)
    Nc = np.array([[complex(N[0][0]), complex(N[0][1])], [complex(N[1][0]), complex(N[1][1])]])
    if not a1z and not a2z:
        kappa = canonical_sqrt(complex(a2) / complex(a1))
        Bsq = bb * bb * a2 / a1
        Bval = complex(bb) * kappa
        sq = canonical_sqrt(complex(Bsq))
        sign = 1 if abs(Bval - sq) <= abs(Bval + sq) else -1
        form: CanonicalForm = Nor(a2, Bsq, sign)
    elif a2z and not a1z:
        kappa = canonical_sqrt(1 / complex(a1))
        ek = rational_sqrt(1 / a1) if exact else None
        if _is_zero(bb, ztol):
            form = Exc1(zero)
        else:
            form = Exc1(bb * ek if ek is not None else complex(bb) * kappa)
    elif a1z and not a2z:
        if _is_zero(bb, ztol):
            kappa, form = 1.0, Exc2(a2, 0)
        else:
            kappa, form = 1 / complex(bb), Exc2(a2, 1)
    else:
        kappa, form = 1.0, Exc3(zero if _is_zero(bb, ztol) else bb)
    T = Nc @ np.diag([kappa, 1.0])
    return (form, LinearTransform(*T.ravel()), exact), None


_FORM_RANK = {"nor": 0, "exc1": 1, "exc2": 2, "exc3": 3}


def _lex_key(form: CanonicalForm) -> tuple:
    if isinstance(form, Nor):
        A = complex(form.A)
        return (round(abs(A), 12), round(cmath.phase(A), 12), round(abs(complex(form.Bsq)), 12))
    return (0.0, 0.0, 0.0)


def reduce_to_canonical(sys: GeneralSystem, tol: float = 1e-10) -> Reduction:
    """Reduce ``sys`` to a canonical form; ``x = T y`` maps form solutions to ``sys`` solutions.

    Among the admissible invariant lines, simple zeros of the ratio cubic are
    preferred, then forms in the order Nor, Exc1, Exc2, Exc3, then exactly
    known lines, then the representative with the smallest ``(|A|, arg A, |B^2|)``.
    """
    lines, p3_zero = _invariant_lines(sys, tol)
    coeffs = sys.coeffs
    candidates = []
    proportional = []
    for line in lines:
        res, alpha = _reduce_with_line(coeffs, line, tol)
        if res is None:
            proportional.append((line, alpha))
            continue
        form, T, exact = res
        rank = (0 if line.multiplicity <= 1 else 1, _FORM_RANK[form.kind], 0 if exact else 1, _lex_key(form))
        candidates.append((rank, form, T, exact, line.label))
    pattern = "A2" if p3_zero else None
    if candidates:
        candidates.sort(key=lambda c: c[0])
        _, form, T, exact, label = candidates[0]
        return Reduction(form, T, exact, label, pattern, [c[1] for c in candidates])
    return _uncoupled(sys, proportional, tol)


def _uncoupled(sys: GeneralSystem, proportional, tol: float) -> Reduction:
    picked = []
    for line, alpha in proportional:
        lam = np.array([complex(line.lam[0]), complex(line.lam[1])])
        if all(abs(lam[0] * q[0][1] - lam[1] * q[0][0]) > tol * np.linalg.norm(lam) * np.linalg.norm(q[0]) for q in picked):
            picked.append((lam, complex(alpha)))
    if len(picked) < 2:
        raise IrreducibleSystem("no invariant line with an independent rate and fewer than two self-rated lines")
    picked = sorted(picked[:2], key=lambda q: 0 if abs(q[1]) > tol else 1)
    rows = []
    sigmas = []
    for lam, alpha in picked:
        if abs(alpha) > tol:
            rows.append(alpha * lam)
            sigmas.append(1)
        else:
            rows.append(lam)
            sigmas.append(0)
    M = np.array(rows)
    T = np.linalg.inv(M)
    return Reduction(Uncoupled(sigmas[0], sigmas[1]), LinearTransform(*T.ravel()), False, "uncoupled")


# -- equivalence orbit ----------------------------------------------------------


def _orbit_parts(A, Bsq):
    D = 4 * A - 4 * A * A + Bsq
    delta = 2 * A * ((1 - 2 * A) * (1 - 2 * A) - Bsq)
    X = 1 - 4 * A * (A - 1) + Bsq
    Y = 1 - 4 * A * A + Bsq
    return D, delta, X, Y


def equivalence_orbit(A, Bsq) -> list[tuple]:
    """Canonical pairs ``(A', B'^2)`` linearly equivalent to ``(A, B^2)``.

    Exact inputs give exact members (``QuadExtValue`` over the extension by
    ``sqrt(B^2 (4A - 4A^2 + B^2))``); complex inputs give complex members.
    The input pair comes first; duplicates are removed.
    """
    exA, exB = to_exact(A), to_exact(Bsq)
    exact = exA is not None and exB is not None
    if exact:
        A, Bsq = exA, exB
    else:
        A, Bsq = complex(A), complex(Bsq)
    if (exact and not A) or (not exact and A == 0):
        raise DegenerateOrbit("A = 0")
    D, delta, X, Y = _orbit_parts(A, Bsq)
    if (exact and not delta) or (not exact and abs(delta) < 1e-14):
        raise DegenerateOrbit("orbit formulas are singular (Delta = 0)")
    members: list[tuple] = []
    if exact:
        r = Bsq * D
        R = QuadExtValue.sqrt_of(r)
        members.append((QuadExtValue.rational(A), QuadExtValue.rational(Bsq)))
        for s1 in (1, -1):
            Ap = (QuadExtValue.rational(4 * A * A - 2 * A - Bsq) - R * s1) / delta
            Bp2 = (QuadExtValue.rational(Bsq * X * X + D * Y * Y) + R * (2 * s1) * X * Y) / (delta * delta)
            members.append((Ap, Bp2))
        out = []
        for m in members:
            if m not in out:
                out.append(m)
        return out
    R = canonical_sqrt(Bsq * D)
    members.append((A, Bsq))
    for s1 in (1, -1):
        Ap = (4 * A * A - 2 * A - Bsq - s1 * R) / delta
        Bp2 = (Bsq * X * X + D * Y * Y + 2 * s1 * X * Y * R) / (delta * delta)
        members.append((Ap, Bp2))
    out = []
    for m in members:
        if not any(abs(m[0] - o[0]) + abs(m[1] - o[1]) <= 1e-10 * (1 + abs(m[0]) + abs(m[1])) for o in out):
            out.append(m)
    return out


def orbit_member_numeric(A, Bsq, s1: int, s2: int, B=None) -> tuple[complex, complex]:
    """``(A(s1, s2), B(s1, s2))`` as complex numbers."""
    A, Bsq = complex(A), complex(Bsq)
    B = canonical_sqrt(Bsq) if B is None else complex(B)
    D, delta, X, Y = _orbit_parts(A, Bsq)
    if abs(delta) < 1e-14:
        raise DegenerateOrbit("orbit formulas are singular (Delta = 0)")
    R = canonical_sqrt(Bsq * D)
    Ap = (4 * A * A - 2 * A - Bsq - s1 * R) / delta
    if B != 0:
        Bp = s2 / (B * delta) * (Bsq * X + s1 * Y * R)
    else:
        Bp = s2 * s1 * Y * canonical_sqrt(D) / delta
    return Ap, Bp


def orbit_transform(A, B, sigma1: int, sigma2: int) -> LinearTransform:
    """Transform ``x = T y`` from the ``(A(s1,s2), B(s1,s2))`` system to the ``(A, B)`` one.

    Built from the invariant lines ``x1 = u_pm x2`` of the ``(A, B)`` system
    and matched to the sign labels of the orbit formulas.
    """
    A, B = complex(A), complex(B)
    if A == 0:
        raise DegenerateOrbit("A = 0")
    Ap, Bp = orbit_member_numeric(A, B * B, sigma1, sigma2, B)
    sys = GeneralSystem.canonical(A, B)
    sq = canonical_sqrt(4 * A - 4 * A * A + B * B)
    best = None
    for up in ((-B + sq) / (2 * A), (-B - sq) / (2 * A)):
        res, _ = _reduce_with_line(sys.coeffs, _Line((1 + 0j, -up), 1, False, ""), 1e-12)
        if res is None or not isinstance(res[0], Nor):
            continue
        form, T, _ = res
        Bf = form.B
        for flip in (1, -1):
            err = abs(complex(form.A) - Ap) + abs(flip * Bf - Bp)
            if best is None or err < best[0]:
                Tm = T.matrix @ np.diag([flip, 1.0])
                best = (err, LinearTransform(*Tm.ravel()))
    if best is None:
        raise DegenerateOrbit("no invariant line reproduces the requested orbit member")
    if best[0] > 1e-6 * (1 + abs(Ap) + abs(Bp)):
        raise DegenerateOrbit(f"orbit member mismatch {best[0]:.3g}")
    return best[1]
