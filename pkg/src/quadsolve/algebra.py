"""Exact Gaussian-rational arithmetic, quadratic extensions and complex polynomials.

The exact layer (``GaussianRational``, ``QuadExtValue``) decides questions such as
"is this exponent rational?"; the numeric layer (``ComplexPoly``, ``poly_roots``)
does the evaluation work with double-precision complex floats.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GaussianRational",
    "QuadExtValue",
    "ComplexPoly",
    "RootFindingError",
    "rational_sqrt",
    "canonical_sqrt",
    "poly_roots",
    "poly_discriminant",
    "to_exact",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class GaussianRational:
    """Exact number ``re + im*i`` with arbitrary-precision rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, str):
            return cls.parse(x)
        return cls(_frac(x), 0)

    # string form: "p/q+r/s i"; also "i/5", "3/5i", "2*i"
    _TERM = re.compile(r"([+-])?(?:(\d+(?:/\d+)?)(\*?i)?|i(?:/(\d+))?)")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        s = text.strip().replace(" ", "").replace("j", "i")
        if not s:
            raise ValueError("empty Gaussian rational")
        re_part = Fraction(0)
        im_part = Fraction(0)
        pos = 0
        while pos < len(s):
            m = cls._TERM.match(s, pos)
            if m is None or m.end() == pos or (pos > 0 and m.group(1) is None):
                raise ValueError(f"cannot parse Gaussian rational {text!r}")
            sign, num, imag_suffix, idiv = m.groups()
            if num is not None:
                val = Fraction(num)
                is_imag = imag_suffix is not None
            else:
                val = Fraction(1, int(idiv)) if idiv else Fraction(1)
                is_imag = True
            if sign == "-":
                val = -val
            if is_imag:
                im_part += val
            else:
                re_part += val
            pos = m.end()
        return cls(re_part, im_part)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        im = self.im
        im_str = "i" if abs(im) == 1 else f"{abs(im)} i"
        if self.re == 0:
            return ("-" if im < 0 else "") + im_str
        return f"{self.re}{'-' if im < 0 else '+'}{im_str}"

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, QuadExtValue):
            return other == self
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _gr_or_none(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        out = GaussianRational(1)
        for _ in range(abs(k)):
            out = out * base
        return out

    @property
    def is_real(self) -> bool:
        return self.im == 0

    @property
    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def as_int(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return int(self.re)

    @property
    def denominator(self) -> int:
        return math.lcm(self.re.denominator, self.im.denominator)


def _gr_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


def to_exact(x) -> GaussianRational | None:
    """Exact value of ``x`` if it is already exact (or a string), else ``None``."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    if isinstance(x, str):
        return GaussianRational.parse(x)
    return None


def _isqrt_fraction(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rational_sqrt(q) -> GaussianRational | None:
    """Square root of ``q`` inside the Gaussian rationals, or ``None``.

    The returned root has positive real part, or zero real part and
    non-negative imaginary part.
    """
    q = GaussianRational.coerce(q)
    a, b = q.re, q.im
    if b == 0:
        if a >= 0:
            r = _isqrt_fraction(a)
            return None if r is None else GaussianRational(r, 0)
        r = _isqrt_fraction(-a)
        return None if r is None else GaussianRational(0, r)
    # (x + iy)^2 = a + ib  =>  x^2 = (a + |q|)/2, y = b/(2x)
    modulus = _isqrt_fraction(a * a + b * b)
    if modulus is None:
        return None
    x = _isqrt_fraction((a + modulus) / 2)
    if x is None or x == 0:
        return None
    return GaussianRational(x, b / (2 * x))


def canonical_sqrt(z: complex) -> complex:
    """Principal square root with the same branch convention as ``rational_sqrt``."""
    r = cmath.sqrt(complex(z))
    if r.real < 0 or (r.real == 0 and r.imag < 0):
        r = -r
    return r


@dataclass(frozen=True)
class QuadExtValue:
    """Exact value ``a + b*sqrt(r)`` over the Gaussian rationals.

    ``sqrt(r)`` denotes the canonical branch (see ``canonical_sqrt``). Values
    built with a perfect-square ``r`` are folded back to ``b == 0``.
    """

    a: GaussianRational
    b: GaussianRational
    r: GaussianRational

    def __post_init__(self):
        for name in ("a", "b", "r"):
            object.__setattr__(self, name, GaussianRational.coerce(getattr(self, name)))
        if self.b and self.r:
            s = rational_sqrt(self.r)
            if s is not None:
                object.__setattr__(self, "a", self.a + self.b * s)
                object.__setattr__(self, "b", GaussianRational(0))
                object.__setattr__(self, "r", GaussianRational(0))
        elif not self.b or not self.r:
            object.__setattr__(self, "b", GaussianRational(0))
            object.__setattr__(self, "r", GaussianRational(0))

    @classmethod
    def rational(cls, a) -> "QuadExtValue":
        return cls(GaussianRational.coerce(a), GaussianRational(0), GaussianRational(0))

    @classmethod
    def sqrt_of(cls, r) -> "QuadExtValue":
        return cls(GaussianRational(0), GaussianRational(1), GaussianRational.coerce(r))

    @property
    def is_rational(self) -> bool:
        return not self.b

    def rational_value(self) -> GaussianRational:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __complex__(self) -> complex:
        return complex(self.a) + complex(self.b) * canonical_sqrt(complex(self.r))

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        return f"({self.a})+({self.b})*sqrt({self.r})"

    def _lift(self, other) -> "QuadExtValue":
        if isinstance(other, QuadExtValue):
            if other.b and self.b and other.r != self.r:
                raise ValueError("values live in different quadratic extensions")
            return other
        return QuadExtValue.rational(other)

    def _field_r(self, other: "QuadExtValue") -> GaussianRational:
        return self.r if self.b else other.r

    def __add__(self, other):
        o = self._lift(other)
        return QuadExtValue(self.a + o.a, self.b + o.b, self._field_r(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExtValue(-self.a, -self.b, self.r)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        r = self._field_r(o)
        return QuadExtValue(self.a * o.a + self.b * o.b * r, self.a * o.b + self.b * o.a, r)

    __rmul__ = __mul__

    def conjugate_ext(self) -> "QuadExtValue":
        return QuadExtValue(self.a, -self.b, self.r)

    def norm_ext(self) -> GaussianRational:
        return self.a * self.a - self.b * self.b * self.r

    def inverse(self) -> "QuadExtValue":
        n = self.norm_ext()
        if not n:
            raise ZeroDivisionError("division by zero in quadratic extension")
        c = self.conjugate_ext()
        return QuadExtValue(c.a / n, c.b / n, self.r)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, (GaussianRational, int, Fraction)):
            return not self.b and self.a == GaussianRational.coerce(other)
        if isinstance(other, QuadExtValue):
            if not self.b and not other.b:
                return self.a == other.a
            return self.a == other.a and self.b == other.b and self.r == other.r
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.r))


class RootFindingError(ArithmeticError):
    """Simultaneous iteration did not converge; ``best`` holds the last iterate."""

    def __init__(self, message: str, best: list[complex]):
        super().__init__(message)
        self.best = best


class ComplexPoly:
    """Polynomial with complex float coefficients in ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex]):
        c = [complex(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [0j]
        self.coeffs = c

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def deriv(self) -> "ComplexPoly":
        return ComplexPoly([k * c for k, c in enumerate(self.coeffs)][1:] or [0j])

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0j] * (n - len(self.coeffs))
        b = other.coeffs + [0j] * (n - len(other.coeffs))
        return ComplexPoly([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + other * -1

    def __mul__(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return ComplexPoly(np.convolve(self.coeffs, other.coeffs))
        return ComplexPoly([c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ComplexPoly":
        out = ComplexPoly([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        return f"ComplexPoly({self.coeffs})"


def _initial_guesses(coeffs: Sequence[complex]) -> list[complex]:
    n = len(coeffs) - 1
    lead = coeffs[-1]
    # Fujiwara-style bound keeps all starting points outside the root cluster
    radius = 2 * max(abs(coeffs[n - k] / lead) ** (1.0 / k) for k in range(1, n + 1))
    radius = max(radius, 1e-300)
    return [radius * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]


def poly_roots(
    p: ComplexPoly | Sequence[complex],
    tol: float = 1e-12,
    *,
    init: Sequence[complex] | None = None,
    max_iter: int = 500,
) -> list[complex]:
    """All complex roots of ``p`` (with multiplicity) by Aberth-Ehrlich iteration.

    ``init`` seeds the iteration (e.g. with the roots of a nearby polynomial);
    the result is deterministic for identical ``p`` and ``init``. Each root is
    polished with Newton steps afterwards.
    """
    if not isinstance(p, ComplexPoly):
        p = ComplexPoly(p)
    n = p.degree
    if n < 1:
        raise ValueError("poly_roots needs degree >= 1")
    c = p.coeffs
    if n == 1:
        return [-c[0] / c[1]]
    lead = c[-1]
    monic = [x / lead for x in c]
    dmonic = [k * monic[k] for k in range(1, n + 1)]
    z = list(init) if init is not None and len(init) == n else _initial_guesses(c)
    # break exact coincidences in the seed
    for i in range(n):
        for j in range(i):
            if z[i] == z[j]:
                z[i] += 1e-8 * (1 + abs(z[i])) * cmath.exp(1j * (i + 1))
    scale = max(abs(x) for x in monic)
    absmonic = [abs(a) for a in monic]
    done = [False] * n
    converged = False
    for _ in range(max_iter):
        biggest = 0.0
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            pv = 0j
            for a in reversed(monic):
                pv = pv * zi + a
            # backward-error stop: residual at rounding level of the evaluation
            az = abs(zi)
            bound = 0.0
            for a in reversed(absmonic):
                bound = bound * az + a
            if abs(pv) <= 4e-16 * bound:
                done[i] = True
                continue
            dv = 0j
            for a in reversed(dmonic):
                dv = dv * zi + a
            s = 0j
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        s += 1.0 / d
            ratio = pv / dv if dv != 0 else complex(math.inf)
            denom = 1.0 - ratio * s
            step = ratio / denom if denom != 0 and math.isfinite(abs(ratio)) else 1e-3 * (1 + abs(zi))
            z[i] = zi - step
            biggest = max(biggest, abs(step) / (1.0 + abs(z[i])))
        if biggest < 1e-15 or all(done):
            converged = True
            break
    z = [_polish(monic, dmonic, r) for r in z]
    bad = [r for r in z if abs(ComplexPoly(monic)(r)) > max(tol, 1e-9) * scale * max(1.0, abs(r)) ** n]
    if not converged and bad:
        raise RootFindingError(f"Aberth iteration did not converge for degree {n}", z)
    return z


def _polish(monic, dmonic, r: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        pv = 0j
        for a in reversed(monic):
            pv = pv * r + a
        dv = 0j
        for a in reversed(dmonic):
            dv = dv * r + a
        if dv == 0 or pv == 0:
            break
        step = pv / dv
        if not math.isfinite(abs(step)):
            break
        cand = r - step
        pc = 0j
        for a in reversed(monic):
            pc = pc * cand + a
        if abs(pc) >= abs(pv):
            break
        r = cand
    return r


def poly_discriminant(p: ComplexPoly | Sequence[complex]) -> complex:
    """Discriminant through the Sylvester resultant of ``p`` and ``p'``."""
    if not isinstance(p, ComplexPoly):
        p = ComplexPoly(p)
    n = p.degree
    if n < 2:
        raise ValueError("poly_discriminant needs degree >= 2")
    a = list(reversed(p.coeffs))  # descending
    b = list(reversed(p.deriv().coeffs))
    m = len(b) - 1
    size = n + m
    S = np.zeros((size, size), dtype=complex)
    for i in range(m):
        S[i, i : i + n + 1] = a
    for i in range(n):
        S[m + i, i : i + m + 1] = b
    res = np.linalg.det(S)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return complex(sign * res / a[0])
