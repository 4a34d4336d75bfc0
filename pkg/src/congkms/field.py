"""Exact arithmetic in ℚ and in quadratic fields ℚ(√d).

Elements are written x + y·ω over the integral basis {1, ω}, where
ω = (1+√d)/2 if d ≡ 1 (mod 4) and ω = √d otherwise. ω satisfies
ω² = t·ω − n with t = Tr(ω), n = N(ω).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import Union

import mpmath

Rational = Union[int, Fraction]


def is_squarefree(d: int) -> bool:
    d = abs(d)
    if d == 0:
        return False
    p = 2
    while p * p <= d:
        if d % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class Field:
    """ℚ (d is None) or ℚ(√d) with d squarefree, d ∉ {0, 1}."""
    d: int | None = None

    def __post_init__(self):
        if self.d is not None:
            if not isinstance(self.d, int) or self.d in (0, 1):
                raise ValueError(f"d must be a squarefree integer not in {{0, 1}}, got {self.d!r}")
            if not is_squarefree(self.d):
                raise ValueError(f"d = {self.d} is not squarefree")

    @property
    def kind(self) -> str:
        return "rational" if self.d is None else "quadratic"

    @property
    def degree(self) -> int:
        return 1 if self.d is None else 2

    @property
    def half_omega(self) -> bool:
        """True when ω = (1+√d)/2."""
        return self.d is not None and self.d % 4 == 1

    @property
    def discriminant(self) -> int:
        if self.d is None:
            return 1
        return self.d if self.half_omega else 4 * self.d

    @property
    def omega_rule(self) -> str:
        if self.d is None:
            return "none"
        return "(1+sqrt(d))/2" if self.half_omega else "sqrt(d)"

    @property
    def t(self) -> int:
        """Trace of ω."""
        return 1 if self.half_omega else 0

    @property
    def n(self) -> int:
        """Norm of ω."""
        if self.d is None:
            return 0
        return (1 - self.d) // 4 if self.half_omega else -self.d

    @property
    def real_places(self) -> int:
        if self.d is None:
            return 1
        return 2 if self.d > 0 else 0

    @property
    def complex_places(self) -> int:
        return 1 if (self.d is not None and self.d < 0) else 0

    @property
    def is_imaginary(self) -> bool:
        return self.d is not None and self.d < 0

    @property
    def is_real_quadratic(self) -> bool:
        return self.d is not None and self.d > 0

    def name(self) -> str:
        return "Q" if self.d is None else f"Q(sqrt({self.d}))"

    def __call__(self, x: Rational = 0, y: Rational = 0) -> "Element":
        return Element(self, Fraction(x), Fraction(y))

    def one(self) -> "Element":
        return self(1)

    def omega(self) -> "Element":
        if self.d is None:
            raise ValueError("ℚ has no ω")
        return self(0, 1)

    def sqrt_d(self) -> "Element":
        if self.d is None:
            raise ValueError("ℚ has no √d")
        return self(-1, 2) if self.half_omega else self(0, 1)

    @cached_property
    def units(self) -> "UnitData":
        return unit_group(self)


def make_field(d) -> Field:
    """Field from a config value: "Q"/None for ℚ, an integer d for ℚ(√d)."""
    if d is None or (isinstance(d, str) and d.strip().upper() in ("Q", "RATIONAL")):
        return Field(None)
    if isinstance(d, bool) or not isinstance(d, int):
        raise ValueError(f"field must be 'Q' or a squarefree integer, got {d!r}")
    return Field(d)


@dataclass(frozen=True)
class Element:
    field: Field
    x: Fraction
    y: Fraction = Fraction(0)

    def __post_init__(self):
        if self.field.d is None and self.y != 0:
            raise ValueError("rational elements have no ω-coordinate")

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return Element(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Element(self.field, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.field, -self.x, -self.y)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Element(self.field, self.x - o.x, self.y - o.y)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.field.t, self.field.n
        yy = self.y * o.y
        return Element(self.field, self.x * o.x - n * yy, self.x * o.y + self.y * o.x + t * yy)

    __rmul__ = __mul__

    def conj(self) -> "Element":
        return Element(self.field, self.x + self.field.t * self.y, -self.y)

    def norm(self) -> Fraction:
        f = self.field
        if f.d is None:
            return self.x
        return self.x * self.x + f.t * self.x * self.y + f.n * self.y * self.y

    def trace(self) -> Fraction:
        return 2 * self.x + self.field.t * self.y if self.field.d is not None else self.x

    def inverse(self) -> "Element":
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj() if self.field.d is not None else Element(self.field, Fraction(1))
        return Element(self.field, c.x / nm, c.y / nm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def coords(self) -> tuple[int, int]:
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        return int(self.x), int(self.y)

    def denominator(self) -> int:
        a, b = self.x.denominator, self.y.denominator
        return a * b // _gcd(a, b)

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of z ↦ self·z on the basis {1, ω} (columns are images)."""
        if self.field.d is None:
            return [[self.x]]
        a = self * self.field.one()
        b = self * self.field.omega()
        return [[a.x, b.x], [a.y, b.y]]

    def embeddings(self, dps: int = 30) -> list:
        """Archimedean embeddings as mpmath numbers (√d ↦ +√|d| first)."""
        f = self.field
        with mpmath.workdps(dps + 10):
            if f.d is None:
                return [mpmath.mpf(self.x.numerator) / self.x.denominator]
            r = mpmath.sqrt(mpmath.mpf(f.d)) if f.d > 0 else mpmath.sqrt(mpmath.mpc(f.d))
            x = mpmath.mpf(self.x.numerator) / self.x.denominator
            y = mpmath.mpf(self.y.numerator) / self.y.denominator
            if f.half_omega:
                w1, w2 = (1 + r) / 2, (1 - r) / 2
            else:
                w1, w2 = r, -r
            return [x + y * w1, x + y * w2]

    def __repr__(self):
        return f"Element({format_element(self)})"

    def __str__(self):
        return format_element(self)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def format_element(e: Element) -> str:
    if e.field.d is None:
        return str(e.x)
    w = "w"
    if e.y == 0:
        return str(e.x)
    ys = "" if e.y == 1 else "-" if e.y == -1 else f"{e.y}*"
    if e.x == 0:
        return f"{ys}{w}"
    sign = "+" if e.y > 0 else "-"
    ya = abs(e.y)
    ys = "" if ya == 1 else f"{ya}*"
    return f"{e.x}{sign}{ys}{w}"


def element_from_json(field: Field, value) -> Element:
    """Decode an element: an int/string rational, or [x, y] over {1, ω}."""
    if isinstance(value, (list, tuple)):
        if len(value) == 1:
            return field(Fraction(value[0]))
        if len(value) != 2:
            raise ValueError(f"element must be [x, y], got {value!r}")
        return field(Fraction(value[0]), Fraction(value[1]))
    if isinstance(value, bool):
        raise ValueError("boolean is not an element")
    if isinstance(value, (int, str)):
        return field(Fraction(value))
    raise ValueError(f"cannot decode element {value!r}")


def element_to_json(e: Element):
    def enc(q: Fraction):
        return int(q) if q.denominator == 1 else str(q)
    if e.field.d is None:
        return enc(e.x)
    return [enc(e.x), enc(e.y)]


def norm_trace(e: Element) -> tuple[Fraction, Fraction]:
    """(N(e), Tr(e)) as determinant and trace of the multiplication matrix."""
    m = e.mult_matrix()
    if len(m) == 1:
        return m[0][0], m[0][0]
    return m[0][0] * m[1][1] - m[0][1] * m[1][0], m[0][0] + m[1][1]


def _sign_a_plus_b_sqrt(a: Fraction, b: Fraction, d: int) -> int:
    """Exact sign of a + b·√d for d > 0."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a² with b²d
    lhs, rhs = a * a, b * b * d
    if lhs == rhs:
        return 0
    return sa if lhs > rhs else sb


def real_signs(e: Element) -> list[int]:
    """Signs of e at the real places, √d ↦ +√d first. Empty for imaginary fields."""
    if e.is_zero():
        raise ValueError("sign of zero")
    f = e.field
    if f.d is None:
        return [1 if e.x > 0 else -1]
    if f.d < 0:
        return []
    if f.half_omega:
        a, b = e.x + e.y / 2, e.y / 2
    else:
        a, b = e.x, e.y
    return [_sign_a_plus_b_sqrt(a, b, f.d), _sign_a_plus_b_sqrt(a, -b, f.d)]


@dataclass(frozen=True)
class UnitData:
    torsion: tuple[Element, ...]
    fundamental: Element | None
    regulator: object  # mpmath.mpf

    @property
    def w(self) -> int:
        return len(self.torsion)

    @property
    def torsion_generator(self) -> Element:
        """A generator of the (cyclic) torsion subgroup."""
        w = self.w
        for z in self.torsion:
            if multiplicative_order(z, w) == w:
                return z
        raise AssertionError("torsion group not cyclic")


def multiplicative_order(z: Element, bound: int) -> int:
    p = z
    for k in range(1, bound + 1):
        if p == z.field.one():
            return k
        p = p * z
    raise ValueError(f"{z} has order > {bound}")


def _torsion(f: Field) -> tuple[Element, ...]:
    if not f.is_imaginary:
        return (f(1), f(-1))
    # positive definite norm form: enumerate N(x + yω) = 1
    out = []
    for y in range(-2, 3):
        for x in range(-2, 3):
            e = f(x, y)
            if e.norm() == 1:
                out.append(e)
    # order as powers of a generator, starting at 1
    w = len(out)
    # prefer ω itself (i or a primitive sixth root) as the generator
    out.sort(key=lambda z: (z != f(0, 1), z.y, z.x))
    gen = next(z for z in out if multiplicative_order(z, w) == w)
    return tuple(gen ** k for k in range(w))


def fundamental_unit(f: Field) -> Element:
    """Fundamental unit > 1 (first embedding) of a real quadratic field.

    Continued fraction of the reduced quadratic irrational ξ = (s + √D)/2,
    s the largest integer < √D with s ≡ D (mod 2); ℤ + ℤξ = R and the product of
    the complete quotients over one period is the fundamental unit.
    """
    if not f.is_real_quadratic:
        raise ValueError("fundamental unit only for real quadratic fields")
    D = f.discriminant
    r = isqrt(D)
    s = r if (r - D) % 2 == 0 else r - 1
    # ξ = (P + √D)/Q with Q | D - P²
    P, Q = s, 2
    sqrtD = f.sqrt_d() * (1 if f.half_omega else 2)
    start = (P, Q)
    prod = f.one()
    while True:
        a = (P + r) // Q
        # next complete quotient
        P = a * Q - P
        Q = (D - P * P) // Q
        prod = prod * ((f(P) + sqrtD) / Q)
        if (P, Q) == start:
            break
    eps = prod
    if real_signs(eps)[0] < 0:
        eps = -eps
    if eps.embeddings()[0] < 1:
        eps = eps.inverse()
    if not eps.is_integral() or abs(eps.norm()) != 1:
        raise AssertionError(f"continued fraction produced a non-unit {eps}")
    return eps


def unit_group(f: Field, dps: int = 60) -> UnitData:
    tors = _torsion(f)
    if f.is_real_quadratic:
        eps = fundamental_unit(f)
        with mpmath.workdps(dps):
            reg = mpmath.log(abs(eps.embeddings(dps)[0]))
        return UnitData(tors, eps, reg)
    return UnitData(tors, None, mpmath.mpf(0))
