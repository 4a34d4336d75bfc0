"""Ideals of ℚ and quadratic fields as Hermite-normal-form lattices.

An ideal is stored as (a, b, c, den): the lattice ℤ·a + ℤ·(b + c·ω) scaled by
1/den, with 0 ≤ b < a, c | a, c | b. For ℚ the ideal (a/den) is stored with
b = 0, c = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, sqrt
from typing import Iterable, Sequence

import numpy as np
import sympy

from .field import Element, Field


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s·a + t·b = g = gcd(a, b) ≥ 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def primes_up_to(n: int) -> list[int]:
    """Primes ≤ n by a numpy sieve (fast enough for n ~ 10⁷)."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].tolist()


def _hnf2(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF basis {(a, 0), (b, c)} of the ℤ-span of integer vectors in ℤ²."""
    a = b = c = 0
    for u, v in vectors:
        if v:
            g, s, t = xgcd(c, v)
            # leftover vector with zero second coordinate
            left = (v // g) * b - (c // g) * u
            b, c = s * b + t * u, g
            a = gcd(a, left)
        else:
            a = gcd(a, u)
    if c == 0 or a == 0:
        raise ValueError("vectors do not span a full-rank lattice")
    b %= a
    return a, b, c


@dataclass(frozen=True, order=True)
class Ideal:
    a: int
    b: int
    c: int
    den: int
    field: Field

    # construction ---------------------------------------------------------

    @staticmethod
    def from_lattice(field: Field, vectors: Iterable[tuple[Fraction, Fraction]]) -> "Ideal":
        vecs = [(Fraction(u), Fraction(v)) for u, v in vectors]
        if not vecs or all(u == 0 and v == 0 for u, v in vecs):
            raise ValueError("zero ideal")
        L = 1
        for u, v in vecs:
            for q in (u, v):
                L = L * q.denominator // gcd(L, q.denominator)
        ivecs = [(int(u * L), int(v * L)) for u, v in vecs]
        if field.d is None:
            g = 0
            for u, _ in ivecs:
                g = gcd(g, u)
            q = Fraction(g, L)
            return Ideal(q.numerator, 0, 1, q.denominator, field)
        a, b, c = _hnf2(ivecs)
        g = gcd(gcd(a, b), c)
        q = Fraction(g, L)
        p, den = q.numerator, q.denominator
        return Ideal(p * a // g, p * b // g, p * c // g, den, field)

    @staticmethod
    def from_generators(field: Field, gens: Sequence[Element]) -> "Ideal":
        """The R-module generated by `gens`, in HNF."""
        vecs = []
        for g in gens:
            if g.field != field:
                raise ValueError("generator from another field")
            vecs.append((g.x, g.y))
            if field.d is not None:
                gw = g * field.omega()
                vecs.append((gw.x, gw.y))
        if all(u == 0 and v == 0 for u, v in vecs):
            raise ValueError("all generators are zero")
        return Ideal.from_lattice(field, vecs)

    @staticmethod
    def unit(field: Field) -> "Ideal":
        return Ideal(1, 0, 1, 1, field)

    @staticmethod
    def principal(x: Element) -> "Ideal":
        return Ideal.from_generators(x.field, [x])

    # basic data -------------------------------------------------------------

    @property
    def norm(self) -> Fraction:
        if self.field.d is None:
            return Fraction(self.a, self.den)
        return Fraction(self.a * self.c, self.den * self.den)

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def inorm(self) -> int:
        """Norm of an integral ideal as int."""
        n = self.norm
        if n.denominator != 1:
            raise ValueError("not an integral ideal")
        return n.numerator

    def hnf(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.den)

    def basis(self) -> list[Element]:
        f = self.field
        if f.d is None:
            return [f(Fraction(self.a, self.den))]
        return [f(Fraction(self.a, self.den)), f(Fraction(self.b, self.den), Fraction(self.c, self.den))]

    def is_unit_ideal(self) -> bool:
        return self.hnf() == (1, 0, 1, 1)

    def __repr__(self):
        return f"Ideal[{self.a},{self.b},{self.c},{self.den}]"

    def _check(self, other: "Ideal"):
        if self.field != other.field:
            raise ValueError("ideals of different fields")

    # membership -------------------------------------------------------------

    def contains(self, e: Element) -> bool:
        if e.field != self.field:
            raise ValueError("element of another field")
        X, Y = e.x * self.den, e.y * self.den
        if X.denominator != 1 or Y.denominator != 1:
            return False
        X, Y = int(X), int(Y)
        if Y % self.c:
            return False
        return (X - (Y // self.c) * self.b) % self.a == 0

    def __contains__(self, e: Element) -> bool:
        return self.contains(e)

    def coords(self, e: Element) -> tuple[int, ...]:
        """Integer coordinates of e ∈ self in the HNF basis."""
        X, Y = e.x * self.den, e.y * self.den
        if X.denominator != 1 or Y.denominator != 1:
            raise ValueError(f"{e} not in {self}")
        X, Y = int(X), int(Y)
        if self.field.d is None:
            if X % self.a:
                raise ValueError(f"{e} not in {self}")
            return (X // self.a,)
        if Y % self.c:
            raise ValueError(f"{e} not in {self}")
        n2 = Y // self.c
        r = X - n2 * self.b
        if r % self.a:
            raise ValueError(f"{e} not in {self}")
        return (r // self.a, n2)

    def reduce(self, e: Element) -> Element:
        """Canonical representative of e modulo an integral ideal (HNF box)."""
        if not self.is_integral:
            raise ValueError("reduction modulo a fractional ideal")
        X, Y = e.coords()
        if self.field.d is None:
            return self.field(X % self.a)
        k = Y // self.c
        return self.field((X - k * self.b) % self.a, Y - k * self.c)

    def residues(self) -> list[Element]:
        """Representatives of R/self: 0 ≤ x < a, 0 ≤ y < c (0 comes first)."""
        f = self.field
        if f.d is None:
            return [f(x) for x in range(self.a)]
        return [f(x, y) for y in range(self.c) for x in range(self.a)]

    # arithmetic -------------------------------------------------------------

    def __mul__(self, other: "Ideal") -> "Ideal":
        if isinstance(other, Element):
            return self.scale(other)
        self._check(other)
        vecs = []
        for e in self.basis():
            for g in other.basis():
                p = e * g
                vecs.append((p.x, p.y))
        return Ideal.from_lattice(self.field, vecs)

    def scale(self, x: Element | int | Fraction) -> "Ideal":
        if not isinstance(x, Element):
            x = self.field(Fraction(x))
        if self.den == 1 and x.is_integral():
            return self._scale_integral(*x.coords())
        vecs = [((e * x).x, (e * x).y) for e in self.basis()]
        return Ideal.from_lattice(self.field, vecs)

    def divide_integral(self, e: Element) -> "Ideal | None":
        """self·e^{-1} when it is integral (self integral, e integral), else None."""
        f = self.field
        n = abs(int(e.norm()))
        if f.d is None:
            return Ideal(self.a // n, 0, 1, 1, f) if self.a % n == 0 else None
        J = self._scale_integral(*e.conj().coords())
        if J.a % n or J.b % n or J.c % n:
            return None
        return Ideal(J.a // n, J.b // n, J.c // n, 1, f)

    def _scale_integral(self, p: int, q: int) -> "Ideal":
        f = self.field
        if f.d is None:
            return Ideal(abs(self.a * p), 0, 1, 1, f)
        vecs = [(p * self.a, q * self.a),
                (p * self.b - f.n * q * self.c, p * self.c + q * self.b + f.t * q * self.c)]
        a, b, c = _hnf2(vecs)
        return Ideal(a, b, c, 1, f)

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            return self.inverse() ** (-k)
        result = Ideal.unit(self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "Ideal":
        if self.field.d is None:
            return self
        return Ideal.from_generators(self.field, [e.conj() for e in self.basis()])

    def inverse(self) -> "Ideal":
        if self.field.d is None:
            return Ideal.from_lattice(self.field, [(Fraction(self.den, self.a), 0)])
        return self.conj().scale(1 / self.norm)

    def __add__(self, other: "Ideal") -> "Ideal":
        self._check(other)
        return Ideal.from_lattice(self.field, [(e.x, e.y) for e in self.basis() + other.basis()])

    def intersect(self, other: "Ideal") -> "Ideal":
        self._check(other)
        return (self.inverse() + other.inverse()).inverse()

    def divides(self, other: "Ideal") -> bool:
        """self | other, i.e. other ⊆ self."""
        self._check(other)
        if self.den == 1 and other.den == 1:
            if self.field.d is None:
                return other.a % self.a == 0
            return (other.a % self.a == 0 and other.c % self.c == 0
                    and (other.b - (other.c // self.c) * self.b) % self.a == 0)
        return all(self.contains(e) for e in other.basis())

    def coprime(self, other: "Ideal") -> bool:
        return (self + other).is_unit_ideal()

    def valuation(self, prime: "Ideal") -> int:
        """v_𝔭(self) for an integral ideal."""
        if not self.is_integral:
            raise ValueError("valuation of a fractional ideal")
        k = 0
        cur = self
        pinv = prime.inverse()
        while prime.divides(cur):
            cur = cur * pinv
            k += 1
        return k

    def prime_factors(self) -> list[tuple["Ideal", int]]:
        """Factorisation of an integral ideal as [(𝔭, e)]."""
        n = self.inorm()
        out = []
        for p in sorted(sympy.factorint(n)):
            for P, _, _ in factor_rational_prime(self.field, p).primes_above:
                v = self.valuation(P)
                if v:
                    out.append((P, v))
        return out


# --------------------------------------------------------------------------
# prime splitting


@dataclass(frozen=True)
class PrimeSplitting:
    p: int
    type: str  # split / inert / ramified
    primes_above: tuple[tuple[Ideal, int, int], ...]  # (𝔭, e, f)


def kronecker_type(field: Field, p: int) -> str:
    """Splitting type of p from the Kronecker symbol (D/p)."""
    if field.d is None:
        return "split"
    k = sympy.jacobi_symbol(field.discriminant % p, p) if p != 2 else _kron2(field.discriminant)
    return {1: "split", -1: "inert", 0: "ramified"}[int(k)]


def _kron2(D: int) -> int:
    if D % 2 == 0:
        return 0
    return 1 if D % 8 in (1, 7) else -1


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a modulo an odd prime p (Tonelli–Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _omega_roots_mod(field: Field, p: int) -> list[int]:
    """Roots of ω's minimal polynomial x² − t·x + n modulo p."""
    t, n = field.t, field.n
    if p == 2:
        return [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    D = field.discriminant % p
    r0 = sqrt_mod_prime(D, p)
    sq = [] if r0 is None else sorted({r0, (-r0) % p})
    inv2 = pow(2, -1, p)
    return sorted({((t + s) * inv2) % p for s in sq})


@lru_cache(maxsize=None)
def factor_rational_prime(field: Field, p: int) -> PrimeSplitting:
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if field.d is None:
        return PrimeSplitting(p, "split", ((Ideal(p, 0, 1, 1, field), 1, 1),))
    roots = _omega_roots_mod(field, p)
    kind = kronecker_type(field, p)
    if kind == "inert":
        assert not roots
        return PrimeSplitting(p, "inert", ((Ideal(p, 0, p, 1, field), 1, 2),))
    if kind == "ramified":
        assert len(roots) == 1
        r = roots[0]
        return PrimeSplitting(p, "ramified", ((Ideal(p, (-r) % p, 1, 1, field), 2, 1),))
    assert len(roots) == 2
    primes = tuple(sorted(((Ideal(p, (-r) % p, 1, 1, field), 1, 1) for r in roots),
                          key=lambda t: t[0].hnf()))
    return PrimeSplitting(p, "split", primes)


def prime_ideals_up_to(field: Field, X: int) -> list[tuple[Ideal, int, int]]:
    """All prime ideals of norm ≤ X as (𝔭, p, f), sorted by (norm, HNF)."""
    out = []
    for p in primes_up_to(X):
        for P, e, f in factor_rational_prime(field, p).primes_above:
            if p ** f <= X:
                out.append((P, p, f))
    out.sort(key=lambda t: (t[1] ** t[2], t[0].hnf()))
    return out


def enumerate_ideals(field: Field, X: int, coprime_to: Ideal | None = None) -> dict[int, list[Ideal]]:
    """Every integral ideal of norm ≤ X (optionally coprime to an ideal), by norm.

    Built as products of prime powers; each ideal appears exactly once.
    """
    primes = [(P, P.inorm()) for P, p, f in prime_ideals_up_to(field, X)]
    if coprime_to is not None:
        primes = [(P, q) for P, q in primes if not P.divides(coprime_to)]
    out: dict[int, list[Ideal]] = {}

    def rec(start: int, ideal: Ideal, norm: int):
        out.setdefault(norm, []).append(ideal)
        for i in range(start, len(primes)):
            P, q = primes[i]
            if norm * q > X:
                break
            cur, n = ideal, norm
            while n * q <= X:
                cur, n = cur * P, n * q
                rec(i + 1, cur, n)

    rec(0, Ideal.unit(field), 1)
    return {n: sorted(v, key=Ideal.hnf) for n, v in sorted(out.items())}


# --------------------------------------------------------------------------
# short vectors, reduction and principality


def _form(field: Field) -> tuple[int, int, int]:
    """Integer positive definite form (A, B, C): A x² + B xy + C y² on x + yω.

    Imaginary fields: the norm. Real fields: |σ₁|² + |σ₂|².
    """
    t, n = field.t, field.n
    if field.is_imaginary:
        return 1, t, n
    return 2, 2 * t, t * t - 2 * n


def _qval(form, v) -> int:
    A, B, C = form
    return A * v[0] * v[0] + B * v[0] * v[1] + C * v[1] * v[1]


def short_vector(ideal: Ideal) -> Element:
    """A short nonzero element of an ideal (Gauss-reduced basis w.r.t. the
    Minkowski form)."""
    f = ideal.field
    if f.d is None:
        return f(Fraction(ideal.a, ideal.den))
    form = _form(f)
    v1, v2 = (ideal.a, 0), (ideal.b, ideal.c)
    A, B, C = form

    def dot(u, v):
        return 2 * A * u[0] * v[0] + B * (u[0] * v[1] + u[1] * v[0]) + 2 * C * u[1] * v[1]

    if _qval(form, v1) > _qval(form, v2):
        v1, v2 = v2, v1
    while True:
        # v2 -= round(<v1,v2>/<v1,v1>) v1
        num, den = dot(v1, v2), dot(v1, v1)
        m = (2 * num + den) // (2 * den)
        v2 = (v2[0] - m * v1[0], v2[1] - m * v1[1])
        if _qval(form, v2) < _qval(form, v1):
            v1, v2 = v2, v1
        else:
            break
    return f(Fraction(v1[0], ideal.den), Fraction(v1[1], ideal.den))


def reduce_ideal(ideal: Ideal) -> tuple[Ideal, Element]:
    """(J, γ) with J = γ·ideal integral of small norm, in the same class."""
    f = ideal.field
    if f.d is None:
        return Ideal.unit(f), f(Fraction(ideal.den, ideal.a))
    if not ideal.is_integral:
        s = f(ideal.den)
        J, g = reduce_ideal(ideal.scale(s))
        return J, g * s
    nI = ideal.norm
    alpha = short_vector(ideal)
    J1 = ideal.conj().scale(alpha / nI)  # (α)·I⁻¹, integral
    alpha1 = short_vector(J1)
    nJ1 = J1.norm
    J2 = J1.conj().scale(alpha1 / nJ1)
    gamma = alpha1 * alpha.conj() / (nJ1 * nI)
    return J2, gamma


def _generator_search(ideal: Ideal) -> Element | None:
    """Generator of an integral ideal, or None if it is not principal.

    Imaginary fields: finitely many elements of norm N(𝔞). Real fields: some
    generator α satisfies √N ≤ |α| < √N·ε and then |y|·√D < √N·(ε+1), so the
    search over y is exhaustive.
    """
    f = ideal.field
    N = ideal.inorm()
    D = f.discriminant
    t = f.t
    if f.is_imaginary:
        ymax = isqrt(4 * N // abs(D)) + 1
        targets = (4 * N,)
    else:
        eps = float(f.units.fundamental.embeddings(20)[0])
        ymax = int(sqrt(N) * (eps + 1) / sqrt(D)) + 2
        targets = (4 * N, -4 * N)
    for y in range(0, ymax + 1):
        for tgt in targets:
            s2 = D * y * y + tgt
            if s2 < 0:
                continue
            s = isqrt(s2)
            if s * s != s2:
                continue
            for tr in (s, -s) if s else (0,):
                if (tr - t * y) % 2:
                    continue
                x = (tr - t * y) // 2
                cand = f(x, y)
                if ideal.contains(cand) and abs(cand.norm()) == N:
                    return cand
    return None


def is_principal(ideal: Ideal) -> Element | None:
    """A generator of the ideal if it is principal, else None (definitive)."""
    f = ideal.field
    if f.d is None:
        return f(Fraction(ideal.a, ideal.den))
    if not ideal.is_integral:
        g = is_principal(ideal.scale(ideal.den))
        return None if g is None else g / ideal.den
    J, gamma = reduce_ideal(ideal)
    g = _generator_search(J)
    if g is None:
        return None
    gen = g / gamma
    assert Ideal.principal(gen) == ideal
    return gen
