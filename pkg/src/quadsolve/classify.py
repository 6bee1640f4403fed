"""Solvability verdicts for canonical systems.

The exponents ``nu_pm`` are the residues of the quadrature integrand at the
two invariant directions ``u_pm``. Integer, half-integer and negative-sum
patterns of these exponents decide whether the time relation reduces to a
polynomial equation.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .algebra import GaussianRational, QuadExtValue, canonical_sqrt, rational_sqrt
from .canonical import (
    CanonicalForm,
    DegenerateOrbit,
    Exc1,
    Exc2,
    Exc3,
    Nor,
    Uncoupled,
    equivalence_orbit,
)

Exact = GaussianRational


class AZeroOrOne(ValueError):
    pass


class DegenerateDiscriminant(ValueError):
    """``4A - 4A^2 + B^2 = 0``: the two invariant directions coincide."""


class SumZero(ValueError):
    pass


def _gr(x) -> GaussianRational:
    return GaussianRational.coerce(x)


def _snap(x, bound: int = 10**4, rtol: float = 1e-10):
    """Exact value of a float parameter if it is a small-denominator rational to ``rtol``."""
    if not isinstance(x, (complex, float)):
        return _gr(x)
    z = complex(x)
    cand = GaussianRational(Fraction(z.real).limit_denominator(bound), Fraction(z.imag).limit_denominator(bound))
    return cand if abs(complex(cand) - z) <= rtol * max(1.0, abs(z)) else None


@dataclass(frozen=True)
class ExponentData:
    A: GaussianRational
    Bsq: GaussianRational
    Bsign: int
    nu_plus: Union[GaussianRational, complex]
    nu_minus: Union[GaussianRational, complex]
    u_plus: complex
    u_minus: complex
    rational: bool
    equal: bool = False

    @property
    def B(self) -> complex:
        return self.Bsign * canonical_sqrt(complex(self.Bsq))

    @property
    def nu_sum(self):
        return self.nu_plus + self.nu_minus

    @property
    def nu_zero(self):
        return self.nu_plus + self.nu_minus - 1

    def numeric(self) -> tuple[complex, complex]:
        return complex(self.nu_plus), complex(self.nu_minus)

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, GaussianRational) else [complex(v).real, complex(v).imag]

        return {
            "nu_plus": enc(self.nu_plus),
            "nu_minus": enc(self.nu_minus),
            "u_plus": enc(self.u_plus),
            "u_minus": enc(self.u_minus),
            "rational": self.rational,
        }


def u_plus_minus(A, B) -> tuple[complex, complex]:
    """Roots of ``A u^2 + B u + (A - 1)``; ``u_plus`` takes the canonical square root."""
    A, B = complex(A), complex(B)
    if A == 0:
        raise AZeroOrOne("A = 0")
    sq = canonical_sqrt(4 * A - 4 * A * A + B * B)
    return (-B + sq) / (2 * A), (-B - sq) / (2 * A)


def exponents_from_AB(A, Bsq, Bsign: int = 1) -> ExponentData:
    A, Bsq = _gr(A), _gr(Bsq)
    if not A or A == 1:
        raise AZeroOrOne(f"A = {A}")
    D = 4 * A - 4 * A * A + Bsq
    if not D:
        raise DegenerateDiscriminant("u_plus = u_minus")
    S = 1 / (1 - A)
    P = A / ((1 - A) * D)
    disc = S * S - 4 * P
    up, um = u_plus_minus(A, Bsign * canonical_sqrt(complex(Bsq)))
    target = 1 / (complex(A) * up * (up - um))
    root = rational_sqrt(disc)
    if root is not None:
        r1, r2 = (S + root) / 2, (S - root) / 2
        rational = True
    else:
        sd = canonical_sqrt(complex(disc))
        r1, r2 = (complex(S) + sd) / 2, (complex(S) - sd) / 2
        rational = False
    if abs(complex(r1) - target) > abs(complex(r2) - target):
        r1, r2 = r2, r1
    return ExponentData(A, Bsq, Bsign, r1, r2, up, um, rational, equal=not disc)


def AB_from_exponents(nu_plus, nu_minus) -> tuple[GaussianRational, GaussianRational]:
    p, m = _gr(nu_plus), _gr(nu_minus)
    s = p + m
    if not s:
        raise SumZero("nu_plus + nu_minus = 0 has no finite A")
    if not p or not m:
        raise ValueError("exponents must be nonzero")
    d = p - m
    A = (s - 1) / s
    Bsq = (d / s) * (d / s) * (s - 1) / (p * m)
    return A, Bsq


@dataclass(frozen=True)
class B0Exponent:
    nu: GaussianRational
    family: Optional[str]  # "plus": A = n/(n+1); "minus": A = 2n/(2n-1)
    n: Optional[int]


def b0_exponent(A) -> B0Exponent:
    """Exponent of the ``B = 0`` system, ``A = (2 nu - 1)/(2 nu)``."""
    A = _gr(A)
    if not A or A == 1:
        raise AZeroOrOne(f"A = {A}")
    nu = 1 / (2 * (1 - A))
    if nu.is_integer and nu.as_int() > 0:
        return B0Exponent(nu, "plus", nu.as_int())
    two = 2 * nu
    if two.is_integer and two.as_int() < 0 and two.as_int() % 2:
        return B0Exponent(nu, "minus", (1 - two.as_int()) // 2)
    return B0Exponent(nu, None, None)


# -- verdicts -------------------------------------------------------------------

GARNIER_TABLE = {
    ("-1/2", "0"): "s_V",
    ("-1", "0"): "s_VI",
    ("-1/3", "-2/9"): "s_VI",
    ("-1/2", "-1"): "s_VII",
    ("-1/5", "-1/25"): "s_VII",
    ("-1", "-1"): "s_VII",
}
CASE34 = {("-2", "0"), ("-1/5", "-27/50")}


@dataclass
class SolvabilityClass:
    """Verdict with its parameters.

    ``tag`` is one of Case31, Case32, Case33, Case34, Garnier, Exceptional,
    Trivial, NotAlgebraic. ``via`` is the orbit member the verdict was read off.
    """

    tag: str
    n: Optional[int] = None
    q: Optional[GaussianRational] = None
    m: Optional[int] = None
    entry: Optional[str] = None
    kind: Optional[str] = None
    reason: Optional[str] = None
    exponents: Optional[ExponentData] = None
    via: Optional[tuple] = None
    orbit: list = field(default_factory=list)
    finite_sheets: Optional[bool] = None

    @property
    def is_algebraic(self) -> bool:
        return self.tag != "NotAlgebraic"

    @property
    def is_case(self) -> bool:
        return self.tag in ("Case31", "Case32", "Case33")

    def key(self) -> tuple:
        return (self.tag, self.n, self.q, self.m, self.entry, self.kind)

    def to_json(self) -> dict:
        out = {"tag": self.tag}
        for k in ("n", "m", "entry", "kind", "reason"):
            v = getattr(self, k)
            if v is not None:
                out[k] = v
        if self.q is not None:
            out["q"] = str(self.q)
        if self.finite_sheets is not None:
            out["finite_sheets"] = self.finite_sheets
        if self.exponents is not None:
            out["exponents"] = self.exponents.to_json()
        if self.via is not None:
            out["via"] = {"A": str(self.via[0]), "B2": str(self.via[1])}
        out["orbit"] = [{"A": str(a), "B2": str(b)} for a, b in self.orbit]
        return out

    def __str__(self) -> str:
        parts = [self.tag]
        for k in ("n", "q", "m", "entry", "kind", "reason"):
            v = getattr(self, k)
            if v is not None:
                parts.append(f"{k}={v}")
        return " ".join(parts)


def _int_pos(x: GaussianRational) -> bool:
    return x.is_integer and x.as_int() > 0


def _nonpos_int(x: GaussianRational) -> bool:
    return x.is_integer and x.as_int() <= 0


def _direct(A: GaussianRational, Bsq: GaussianRational) -> SolvabilityClass | None:
    key = (str(A), str(Bsq))
    if key in GARNIER_TABLE:
        return SolvabilityClass("Garnier", entry=GARNIER_TABLE[key], finite_sheets=True)
    if key in CASE34:
        return SolvabilityClass("Case34", finite_sheets=True)
    try:
        ex = exponents_from_AB(A, Bsq)
    except (AZeroOrOne, DegenerateDiscriminant):
        return None
    if not ex.rational:
        return None
    p, m = ex.nu_plus, ex.nu_minus
    real = p.is_real and m.is_real
    # Case 3.1: one exponent a positive integer, the other nonzero
    if p and m and (_int_pos(p) or _int_pos(m)):
        if _int_pos(p) and _int_pos(m):
            n, q = max(p.as_int(), m.as_int()), GaussianRational(min(p.as_int(), m.as_int()))
        elif _int_pos(m):
            n, q = m.as_int(), p
        else:
            n, q = p.as_int(), m
        if q.is_integer and -(n - 1) <= q.as_int() <= 0:
            return SolvabilityClass("NotAlgebraic", reason="logarithmic", exponents=ex)
        return SolvabilityClass("Case31", n=n, q=q, exponents=ex, finite_sheets=real)
    s = p + m
    if s.is_integer and s.as_int() < 0 and p and m and not _nonpos_int(p) and not _nonpos_int(m):
        n = -s.as_int()
        d = p - m
        if d.is_integer:
            mm = abs(d.as_int())
            if mm % 2 != n % 2:
                return SolvabilityClass("Case33", n=n, m=mm, exponents=ex, finite_sheets=True)
            return None
        # sign of q follows the sign convention of the B formula
        q = d if (d.re > 0 or (d.re == 0 and d.im > 0)) else -d
        return SolvabilityClass("Case32", n=n, q=q, exponents=ex, finite_sheets=real)
    return None


def _num_str(x) -> str:
    if isinstance(x, (complex, float)):
        return f"{complex(x):.15g}"
    return str(x)


def classify(form: CanonicalForm) -> SolvabilityClass:
    if isinstance(form, Exc3):
        return SolvabilityClass("Garnier", entry="s_IV", finite_sheets=True)
    if isinstance(form, Exc1):
        if complex(form.B) == 0:
            return SolvabilityClass("Garnier", entry="s_II", finite_sheets=True)
        return SolvabilityClass("Exceptional", kind="exc1")
    if isinstance(form, Exc2):
        if complex(form.A) == 1 and form.sigma == 0:
            return SolvabilityClass("Garnier", entry="S_I2", finite_sheets=True)
        return SolvabilityClass("Exceptional", kind="exc2")
    if isinstance(form, Uncoupled):
        return SolvabilityClass("Trivial", kind="uncoupled", finite_sheets=True)
    if not isinstance(form, Nor):
        raise TypeError(f"unknown form {form!r}")
    A, Bsq = _snap(form.A), _snap(form.Bsq)
    if A is None or Bsq is None:
        # floating-point parameters with no nearby small rational: no exact orbit
        A, Bsq = _gr(form.A), _gr(form.Bsq)
        members = []
    else:
        try:
            members = equivalence_orbit(A, Bsq)
        except DegenerateOrbit:
            members = [(QuadExtValue.rational(A), QuadExtValue.rational(Bsq))]
    rational_members = [(a.rational_value(), b.rational_value()) for a, b in members if a.is_rational and b.is_rational]
    orbit = [(str(a), str(b)) for a, b in members] or [(_num_str(form.A), _num_str(form.Bsq))]
    # the input member first, then the others in orbit order
    for a, b in rational_members:
        verdict = _direct(a, b)
        if verdict is None or verdict.tag == "NotAlgebraic":
            continue
        verdict.via = (a, b)
        verdict.orbit = orbit
        if verdict.exponents is None:
            try:
                verdict.exponents = exponents_from_AB(A, Bsq, form.Bsign)
            except (AZeroOrOne, DegenerateDiscriminant):
                pass
        elif (a, b) == (A, Bsq):
            verdict.exponents = exponents_from_AB(A, Bsq, form.Bsign)
        return verdict
    try:
        ex = exponents_from_AB(A, Bsq, form.Bsign)
    except AZeroOrOne:
        return SolvabilityClass("NotAlgebraic", reason="A=1", orbit=orbit)
    except DegenerateDiscriminant:
        return SolvabilityClass("NotAlgebraic", reason="double root u+=u-", orbit=orbit)
    first = _direct(A, Bsq)
    if first is not None and first.tag == "NotAlgebraic":
        first.orbit = orbit
        return first
    reason = "exponents not rational" if not ex.rational else "rational exponents outside the listed cases"
    return SolvabilityClass("NotAlgebraic", reason=reason, exponents=ex, orbit=orbit)
