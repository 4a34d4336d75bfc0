"""Absolute ideal class group of ℚ or a quadratic field."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import pi, sqrt

from .field import Element, Field
from .ideals import Ideal, _form, _hnf2, _qval, is_principal, prime_ideals_up_to, reduce_ideal
from .linalg import FiniteAbelianGroup, enumerate_group, structure_from_relations


def minkowski_bound(f: Field) -> float:
    if f.d is None:
        return 1.0
    D = abs(f.discriminant)
    if f.is_imaginary:
        return 2 / pi * sqrt(D)
    return sqrt(D) / 2


def _short(form, v1, v2):
    A, B, C = form
    if _qval(form, v1) > _qval(form, v2):
        v1, v2 = v2, v1
    while True:
        num = 2 * A * v1[0] * v2[0] + B * (v1[0] * v2[1] + v1[1] * v2[0]) + 2 * C * v1[1] * v2[1]
        den = 2 * _qval(form, v1)
        m = (2 * num + den) // (2 * den)
        v2 = (v2[0] - m * v1[0], v2[1] - m * v1[1])
        if _qval(form, v2) < _qval(form, v1):
            v1, v2 = v2, v1
        else:
            return v1


def reduced_hnf(f: Field, a: int, b: int, c: int) -> tuple[int, int, int]:
    """Integer-only version of `reduce_ideal` for an integral ideal given by
    its HNF (a, b, c); returns the HNF of the reduced ideal."""
    form = _form(f)
    t, n = f.t, f.n
    for _ in range(2):
        p, q = _short(form, (a, 0), (b, c))
        N = a * c
        # α·conj(I)/N with conj(b + cω) = (b + ct) − cω
        u, v = b + c * t, -c
        g1 = (p * a, q * a)
        g2 = (p * u - n * q * v, p * v + q * u + t * q * v)
        a, b, c = _hnf2([(g1[0] // N, g1[1] // N), (g2[0] // N, g2[1] // N)])
    return a, b, c


class ClassKeyer:
    """Assigns each ideal the index of its class, growing the list of classes
    on first sight. Equivalence is decided by an exact principality test."""

    def __init__(self, f: Field):
        self.field = f
        self.reps: list[Ideal] = [Ideal.unit(f)]
        self.cache: dict[tuple, int] = {Ideal.unit(f).hnf(): 0}

    def key_integral(self, a: int, b: int, c: int) -> int:
        """Class index of the integral ideal with HNF (a, b, c)."""
        if self.field.d is None:
            return 0
        r = reduced_hnf(self.field, a, b, c)
        idx = self.cache.get(r + (1,))
        if idx is None:
            idx = self(Ideal(r[0], r[1], r[2], 1, self.field))
        return idx

    def __call__(self, ideal: Ideal) -> int:
        if self.field.d is None:
            return 0
        J, _ = reduce_ideal(ideal)
        key = J.hnf()
        if key in self.cache:
            return self.cache[key]
        Jc = J.conj()
        for i, rep in enumerate(self.reps):
            if is_principal(rep * Jc) is not None:
                self.cache[key] = i
                return i
        self.reps.append(J)
        self.cache[key] = len(self.reps) - 1
        return self.cache[key]


@dataclass
class ClassGroup:
    """Cl(K) with SNF generators (integral ideals) and discrete logarithms."""
    field: Field
    group: FiniteAbelianGroup
    keyer: ClassKeyer
    words: list  # class index -> exponent word over the base generators
    base: list[Ideal]
    to_snf: list
    _gen_cache: dict = dc_field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def generators(self) -> list[Ideal]:
        return self.group.generators

    def dlog(self, ideal: Ideal) -> tuple[int, ...]:
        idx = self.keyer(ideal)
        if idx >= len(self.words):
            raise AssertionError("ideal class outside the computed group")
        w = self.words[idx]
        vec = [sum(w[j] * self.to_snf[j][i] for j in range(len(w)))
               for i in range(len(self.group.cyclic_orders))]
        return self.group.reduce(vec)

    def dlog_integral(self, a: int, b: int, c: int) -> tuple[int, ...]:
        w = self.words[self.keyer.key_integral(a, b, c)]
        vec = [sum(w[j] * self.to_snf[j][i] for j in range(len(w)))
               for i in range(len(self.group.cyclic_orders))]
        return self.group.reduce(vec)

    def decompose(self, ideal: Ideal) -> tuple[tuple[int, ...], Element]:
        """(v, x) with ideal = Π g_i^{v_i} · (x)."""
        f = self.field
        v = self.dlog(ideal)
        J = ideal
        scale = Fraction(1)
        for g, e in zip(self.generators, v):
            if e:
                J = J * (g.conj() ** e)
                scale *= g.norm ** e
        gen = is_principal(J)
        if gen is None:
            raise AssertionError("class group discrete log inconsistent")
        x = gen / f(scale)
        return v, x


def class_group(f: Field) -> ClassGroup:
    """Cl(K) from relations among prime ideals of norm ≤ max(Minkowski, 30).

    Generators are added greedily (a prime is kept only if it enlarges the
    subgroup reached so far); the Schreier relations of the resulting closure
    give the SNF presentation.
    """
    keyer = ClassKeyer(f)
    one = Ideal.unit(f)
    if f.d is None:
        grp = FiniteAbelianGroup([], [], None)
        cg = ClassGroup(f, grp, keyer, [()], [], [])
        grp.dlog = cg.dlog
        return cg
    bound = int(max(minkowski_bound(f), 30))
    candidates = [P for P, p, fdeg in prime_ideals_up_to(f, bound)]

    def mul(I, P):
        return reduce_ideal(I * P)[0]

    base: list[Ideal] = []
    reached = {0}
    for P in candidates:
        if keyer(P) in reached:
            continue
        base.append(P)
        elements, _, _, index = enumerate_group(one, base, mul, keyer)
        reached = set(index)
    elements, words, relations, index = enumerate_group(one, base, mul, keyer)
    # words indexed by class key
    by_key = [None] * len(keyer.reps)
    for k, i in index.items():
        by_key[k] = words[i]
    if any(w is None for w in by_key):
        raise AssertionError("base primes do not generate the class group")
    orders, to_snf, from_snf = structure_from_relations(relations, len(base))
    gens = []
    for row in from_snf:
        g = one
        for P, e in zip(base, row):
            if e:
                g = g * (P ** e)
        gens.append(reduce_ideal(g)[0])
    grp = FiniteAbelianGroup(orders, gens, None)
    cg = ClassGroup(f, grp, keyer, by_key, base, to_snf)
    grp.dlog = cg.dlog
    return cg
