"""Moduli, residue groups (R/m)*, congruence monoids and generalized class groups."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import gcd, log
from typing import Sequence

import sympy

from .classgroup import ClassGroup, class_group
from .field import Element, Field, real_signs
from .ideals import Ideal, _generator_search, enumerate_ideals, factor_rational_prime, is_principal, prime_ideals_up_to
from .linalg import FiniteAbelianGroup, enumerate_group, structure_from_relations


@dataclass(frozen=True)
class Modulus:
    m0: Ideal
    m_inf: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.m0.is_integral:
            raise ValueError("m0 must be an integral ideal")
        nplaces = self.m0.field.real_places
        if len(set(self.m_inf)) != len(self.m_inf) or any(not 0 <= i < nplaces for i in self.m_inf):
            raise ValueError(f"invalid real places {self.m_inf} (field has {nplaces})")

    @property
    def field(self) -> Field:
        return self.m0.field

    @property
    def r0(self) -> int:
        return len(self.m_inf)

    @cached_property
    def primes(self) -> tuple[Ideal, ...]:
        """Prime ideals dividing m0."""
        return tuple(P for P, _ in self.m0.prime_factors())

    @cached_property
    def support_Q(self) -> frozenset[int]:
        return frozenset(_below(P) for P in self.primes)

    def coprime_element(self, e: Element) -> bool:
        """v_𝔭(e) = 0 for every 𝔭 | m0 (e integral, nonzero)."""
        return not any(P.contains(e) for P in self.primes)

    def coprime_ideal(self, ideal: Ideal) -> bool:
        return not any(_ideal_valuation_nonzero(ideal, P) for P in self.primes)

    def describe(self) -> str:
        places = "".join(f"·∞{i + 1}" for i in self.m_inf)
        return f"m0={list(self.m0.hnf())}{places}"


def _below(P: Ideal) -> int:
    n = P.inorm()
    return int(sympy.primefactors(n)[0])


def _ideal_valuation_nonzero(ideal: Ideal, P: Ideal) -> bool:
    """Whether 𝔭 appears in the factorisation of a fractional ideal."""
    if ideal.is_integral:
        return P.divides(ideal)
    num = ideal.scale(ideal.den)  # integral
    d = Ideal.principal(ideal.field(ideal.den))
    return num.valuation(P) != d.valuation(P)


@dataclass(frozen=True)
class ResidueClass:
    signs: tuple[int, ...]
    residue: Element

    def key(self):
        return (self.signs, self.residue.x, self.residue.y)

    def __str__(self):
        s = "".join("+" if x > 0 else "-" for x in self.signs)
        return f"({s}, {self.residue} mod m0)" if s else f"({self.residue} mod m0)"


class ResidueGroup:
    """(R/m)* = signs at m_inf × (R/m0)*, enumerated exhaustively."""

    def __init__(self, modulus: Modulus):
        self.modulus = modulus
        f = modulus.field
        m0 = modulus.m0
        units = [r for r in m0.residues() if modulus.coprime_element(r)]
        signs = list(product((1, -1), repeat=modulus.r0))
        self.elements = [ResidueClass(s, r) for s in signs for r in units]
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.identity = ResidueClass(tuple([1] * modulus.r0), m0.reduce(f(1)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, g: ResidueClass, h: ResidueClass) -> ResidueClass:
        s = tuple(a * b for a, b in zip(g.signs, h.signs))
        return ResidueClass(s, self.modulus.m0.reduce(g.residue * h.residue))

    def power(self, g: ResidueClass, k: int) -> ResidueClass:
        if k < 0:
            return self.power(self.inv(g), -k)
        r = self.identity
        while k:
            if k & 1:
                r = self.mul(r, g)
            g = self.mul(g, g)
            k >>= 1
        return r

    def inv(self, g: ResidueClass) -> ResidueClass:
        return self.power(g, self.order - 1)

    def reduce(self, a: Element) -> ResidueClass:
        """[a]_m for an integral a coprime to m0."""
        if not a.is_integral():
            return self.reduce_fraction(a)
        if a.is_zero() or not self.modulus.coprime_element(a):
            raise ValueError(f"{a} is not coprime to m0")
        signs = real_signs(a)
        return ResidueClass(tuple(signs[i] for i in self.modulus.m_inf), self.modulus.m0.reduce(a))

    def reduce_fraction(self, x: Element) -> ResidueClass:
        """[x]_m for x ∈ K with (x) coprime to m0, via a denominator z coprime to m0."""
        f = x.field
        if x.is_integral():
            return self.reduce(x)
        dual = Ideal.from_generators(f, [f(1), x]).inverse()  # {r : r, rx ∈ R}
        basis = dual.basis()
        for radius in range(0, 50):
            for i in range(-radius, radius + 1):
                for j in ([-radius, radius] if abs(i) != radius else range(-radius, radius + 1)):
                    z = basis[0] * i + (basis[1] * j if len(basis) > 1 else 0)
                    if z.is_zero() or not self.modulus.coprime_element(z):
                        continue
                    zx = z * x
                    if not self.modulus.coprime_element(zx):
                        raise ValueError(f"{x} is not coprime to m0")
                    return self.mul(self.reduce(zx), self.inv(self.reduce(z)))
                if len(basis) == 1:
                    break
        raise AssertionError("no denominator coprime to m0 found")

    def closure(self, gens: Sequence[ResidueClass]) -> frozenset[ResidueClass]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for g in frontier:
                for h in gens:
                    p = self.mul(g, h)
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return frozenset(seen)

    def lift(self, g: ResidueClass) -> Element:
        """An integral element β with [β]_m = g (coprime to m0)."""
        m0 = self.modulus.m0
        base = g.residue
        if m0.is_unit_ideal():
            base = self.modulus.field(1)
        basis = m0.basis()
        for radius in range(0, 200):
            rng = range(-radius, radius + 1)
            for i in rng:
                for j in (rng if len(basis) > 1 else [0]):
                    if max(abs(i), abs(j)) != radius:
                        continue
                    b = base + basis[0] * i + (basis[1] * j if len(basis) > 1 else 0)
                    if b.is_zero():
                        continue
                    if self.reduce(b) == g:
                        return b
        raise AssertionError(f"could not lift {g}")


@dataclass(frozen=True)
class GammaSubgroup:
    generators: tuple[ResidueClass, ...]
    elements: frozenset[ResidueClass]

    @property
    def order(self) -> int:
        return len(self.elements)


def make_gamma(group: ResidueGroup, gens: Sequence[ResidueClass] | str | None) -> GammaSubgroup:
    """Γ from generators; "all" gives (R/m)* itself, None the trivial group."""
    if gens == "all":
        gens = tuple(group.elements)
        return GammaSubgroup(gens, frozenset(group.elements))
    gens = tuple(gens or ())
    for g in gens:
        if g not in group.index:
            raise ValueError(f"{g} is not an element of (R/m)*")
    return GammaSubgroup(gens, group.closure(gens))


@dataclass(eq=False)
class SystemDescriptor:
    """The triple (K, m, Γ) with a truncation bound X."""
    field: Field
    modulus: Modulus
    gamma_spec: object = None  # list of ResidueClass, "all", or None
    truncation: int = 1000
    label: str = ""

    def __post_init__(self):
        if self.modulus.field != self.field:
            raise ValueError("modulus from another field")
        if self.truncation < 1:
            raise ValueError("truncation must be ≥ 1")

    @cached_property
    def residue_group(self) -> ResidueGroup:
        return ResidueGroup(self.modulus)

    @cached_property
    def gamma(self) -> GammaSubgroup:
        return make_gamma(self.residue_group, self.gamma_spec)

    @cached_property
    def units(self) -> "RestrictedUnits":
        return restricted_unit_group(self)

    @cached_property
    def class_data(self) -> "GeneralizedClassData":
        return generalized_class_group(self)

    def monoid_contains(self, a: Element) -> bool:
        return monoid_contains(a, self)

    def name(self) -> str:
        return self.label or f"{self.field.name()} {self.modulus.describe()} |Γ|={self.gamma.order}"


def reduce_mod_m(a: Element, m: Modulus) -> ResidueClass:
    return ResidueGroup(m).reduce(a)


def monoid_contains(a: Element, sys: SystemDescriptor) -> bool:
    if a.is_zero() or not a.is_integral():
        return False
    if not sys.modulus.coprime_element(a):
        return False
    return sys.residue_group.reduce(a) in sys.gamma.elements


# --------------------------------------------------------------------------
# restricted unit group


@dataclass(frozen=True)
class RestrictedUnits:
    """R*_{m,Γ} = ⟨ζ⟩ × ⟨η⟩ with ζ of order `torsion_order` and η free (optional)."""
    torsion: tuple[Element, ...]
    torsion_generator: Element
    free_generator: Element | None
    free_exponent: int  # η = ζ0^i · ε^k with k = free_exponent

    @property
    def torsion_order(self) -> int:
        return len(self.torsion)

    @property
    def trivial(self) -> bool:
        return self.torsion_order == 1 and self.free_generator is None

    def generators(self) -> list[Element]:
        out = []
        if self.torsion_order > 1:
            out.append(self.torsion_generator)
        if self.free_generator is not None:
            out.append(self.free_generator)
        return out

    def element(self, i: int, k: int) -> Element:
        """ζ^i η^k."""
        z = self.torsion_generator ** (i % self.torsion_order)
        if k and self.free_generator is not None:
            z = z * self.free_generator ** k
        return z

    def exponents(self, u: Element) -> tuple[int, int]:
        """(i, k) with u = ζ^i η^k; ValueError if u ∉ R*_{m,Γ}."""
        if not u.is_integral() or abs(u.norm()) != 1:
            raise ValueError(f"{u} is not a unit")
        k = 0
        if self.free_generator is not None:
            lu = abs(float(u.embeddings(30)[0]))
            le = abs(float(self.free_generator.embeddings(30)[0]))
            k = round(log(lu) / log(le))
            u = u * self.free_generator ** (-k)
        for i, z in enumerate(self.torsion):
            if z == u:
                return i, k
        raise ValueError(f"unit not in R*_(m,Γ)")


def restricted_unit_group(sys: SystemDescriptor) -> RestrictedUnits:
    f = sys.field
    U = f.units
    G = sys.residue_group
    gamma = sys.gamma.elements
    zeta = U.torsion_generator
    w = U.w
    powers = [zeta ** i for i in range(w)]
    in_gamma = [G.reduce(z) in gamma for z in powers]
    j0 = next(i for i in range(1, w + 1) if i == w or in_gamma[i])
    tors = tuple(powers[i] for i in range(0, w, j0))
    tgen = powers[j0 % w]
    free = None
    kfree = 0
    if U.fundamental is not None:
        eps = U.fundamental
        e = f(1)
        for k in range(1, G.order * w + 1):
            e = e * eps
            hit = next((i for i in range(w) if G.reduce(powers[i] * e) in gamma), None)
            if hit is not None:
                free = powers[hit] * e
                kfree = k
                break
        if free is None:
            raise AssertionError("no power of the fundamental unit lies in Γ")
    return RestrictedUnits(tors, tgen, free, kfree)


# --------------------------------------------------------------------------
# generalized class group


@dataclass
class GeneralizedClassData:
    sys: SystemDescriptor
    group: FiniteAbelianGroup
    representatives: dict  # class vector -> integral ideal 𝔞_κ
    cl: ClassGroup
    cl_lifts: list[Ideal]  # Cl generators chosen coprime to m0
    q_orders: list[int]
    q_dlog: dict  # residue class -> Q-vector
    to_snf: list
    residue_invariants: dict
    closed_form_order: int
    degenerate_gamma: bool

    def class_of(self, ideal: Ideal) -> tuple[int, ...]:
        if not self.sys.modulus.coprime_ideal(ideal):
            raise ValueError(f"{ideal} is not coprime to m0")
        if not self.q_orders and ideal.is_integral:
            return self.class_of_hnf(ideal.a, ideal.b, ideal.c)
        v, x = decompose(self.cl, ideal, self.cl_lifts)
        q = self.q_dlog[self.sys.residue_group.reduce_fraction(x)]
        vec = list(v) + list(q)
        out = [sum(vec[j] * self.to_snf[j][i] for j in range(len(vec)))
               for i in range(len(self.group.cyclic_orders))]
        return self.group.reduce(out)

    def class_of_hnf(self, a: int, b: int, c: int) -> tuple[int, ...]:
        """Fast path for integral ideals when (R/m)* contributes nothing."""
        if self.q_orders:
            return self.class_of(Ideal(a, b, c, 1, self.sys.field))
        v = self.cl.dlog_integral(a, b, c)
        out = [sum(v[j] * self.to_snf[j][i] for j in range(len(v)))
               for i in range(len(self.group.cyclic_orders))]
        return self.group.reduce(out)

    @property
    def order(self) -> int:
        return self.group.order

    def classes(self) -> list[tuple[int, ...]]:
        return sorted(self.representatives, key=lambda k: (self.representatives[k].inorm(),
                                                           self.representatives[k].hnf()))

    def identity(self) -> tuple[int, ...]:
        return self.group.identity()

    def min_norm(self, kappa) -> int:
        return self.representatives[tuple(kappa)].inorm()


def decompose(cl: ClassGroup, ideal: Ideal, lifts: Sequence[Ideal]) -> tuple[tuple[int, ...], Element]:
    """(v, x) with ideal = Π lifts_i^{v_i} · (x); lifts represent the SNF basis of Cl."""
    f = ideal.field
    v = cl.dlog(ideal)
    J = ideal
    scale = Fraction(1)
    for g, e in zip(lifts, v):
        if e:
            J = J * (g.conj() ** e)
            scale *= g.norm ** e
    gen = is_principal(J)
    if gen is None:
        raise AssertionError("class group discrete log inconsistent")
    return v, gen / f(scale)


def _coprime_lifts(cl: ClassGroup, modulus: Modulus) -> list[Ideal]:
    """Prime ideals coprime to m0 representing the SNF basis vectors of Cl."""
    out = []
    r = len(cl.group.cyclic_orders)
    targets = [tuple(int(i == j) for j in range(r)) for i in range(r)]
    X = 50
    found: dict = {}
    while len(found) < r:
        for P, p, fdeg in prime_ideals_up_to(cl.field, X):
            if not modulus.coprime_ideal(P):
                continue
            d = cl.dlog(P)
            if d in targets and d not in found:
                found[d] = P
        X *= 2
        if X > 10 ** 6:
            raise AssertionError("could not find coprime class representatives")
    return [found[t] for t in targets]


def generalized_class_group(sys: SystemDescriptor) -> GeneralizedClassData:
    f = sys.field
    G = sys.residue_group
    cl = class_group(f)
    U = f.units
    unit_gens = [G.reduce(U.torsion_generator)]
    if U.fundamental is not None:
        unit_gens.append(G.reduce(U.fundamental))
    unit_image = G.closure(unit_gens)
    H = G.closure(list(sys.gamma.generators) + unit_gens) if sys.gamma.order < G.order else frozenset(G.elements)
    # cosets of H
    coset_of: dict = {}
    ncosets = 0
    for g in G.elements:
        if g in coset_of:
            continue
        for h in H:
            coset_of[G.mul(g, h)] = ncosets
        ncosets += 1
    # greedy generators of Q = (R/m)*/H
    qgens: list[ResidueClass] = []
    reached = {coset_of[G.identity]}
    key = coset_of.__getitem__
    for g in G.elements:
        if coset_of[g] in reached:
            continue
        qgens.append(g)
        _, _, _, index = enumerate_group(G.identity, qgens, G.mul, key)
        reached = set(index)
    _, qwords, qrels, qindex = enumerate_group(G.identity, qgens, G.mul, key)
    q_orders, q_to, q_from = structure_from_relations(qrels, len(qgens))
    word_of_coset = {k: qwords[i] for k, i in qindex.items()}

    def q_vec(g):
        w = word_of_coset[coset_of[g]]
        return tuple(sum(w[j] * q_to[j][i] for j in range(len(w))) % q_orders[i]
                     for i in range(len(q_orders)))

    q_dlog = {g: q_vec(g) for g in G.elements}
    # SNF basis elements of Q as residue classes
    q_basis = []
    for row in q_from:
        g = G.identity
        for h, e in zip(qgens, row):
            g = G.mul(g, G.power(h, e))
        q_basis.append(g)
    # Cl part
    lifts = _coprime_lifts(cl, sys.modulus)
    r, s = len(cl.group.cyclic_orders), len(q_orders)
    relations = []
    for j, c in enumerate(q_orders):
        row = [0] * (r + s)
        row[r + j] = c
        relations.append(row)
    for i, (g, d) in enumerate(zip(lifts, cl.group.cyclic_orders)):
        alpha = is_principal(g ** d)
        qv = q_dlog[G.reduce(alpha)]
        row = [0] * (r + s)
        row[i] = d
        for j in range(s):
            row[r + j] -= qv[j]
        relations.append(row)
    orders, to_snf, _ = structure_from_relations(relations, r + s)
    grp = FiniteAbelianGroup(orders, [], None)
    data = GeneralizedClassData(sys, grp, {}, cl, lifts, q_orders, q_dlog, to_snf, {}, 0, False)
    grp.dlog = data.class_of
    # class representatives: smallest norm, then HNF
    X = 8
    reps: dict = {}
    while len(reps) < grp.order:
        reps = {}
        for n, ideals in enumerate_ideals(f, X, sys.modulus.m0).items():
            for I in ideals:
                k = data.class_of(I)
                if k not in reps:
                    reps[k] = I
        X *= 2
    data.representatives = reps
    grp.generators = [None] * len(orders)
    for i in range(len(orders)):
        e = tuple(int(i == j) for j in range(len(orders)))
        grp.generators[i] = reps[e]
    # residue invariants and the independent order count
    w_m = sum(1 for z in U.torsion if G.reduce(z) == G.identity)
    index_units = len(unit_image)
    gamma_cap = len(sys.gamma.elements & unit_image)
    gamma_bar = sys.gamma.order // gamma_cap
    data.residue_invariants = {"w_m": w_m, "unit_index": index_units, "gamma_bar": gamma_bar}
    ray_order = cl.order * G.order // index_units
    if ray_order % gamma_bar:
        raise AssertionError("|Γ̄| does not divide the ray class number")
    data.closed_form_order = ray_order // gamma_bar
    data.degenerate_gamma = sys.gamma.elements <= unit_image
    if data.closed_form_order != grp.order:
        raise AssertionError(f"generalized class number mismatch: SNF {grp.order} vs "
                             f"closed form {data.closed_form_order}")
    return data


def transporter(x: Ideal, target: Ideal, sys: SystemDescriptor) -> Element:
    """t ∈ K_{m,Γ} with t·x = target, for x and target in the same class."""
    G = sys.residue_group
    gamma = sys.gamma.elements
    if x == target:
        return sys.field(1)
    t0 = None
    if x.is_integral and target.is_integral and sys.field.d is not None:
        # target·x̄ is integral; its generator over N(x) carries x to target
        J = target * x.conj()
        if J.inorm() <= 10 ** 7:
            gam = _generator_search(J)
            if gam is None:
                raise ValueError("ideals lie in different classes")
            t0 = gam / x.inorm()
    if t0 is None:
        t0 = is_principal(target * x.inverse())
    if t0 is None:
        raise ValueError("ideals lie in different classes")
    U = sys.field.units
    zeta = U.torsion_generator
    tors = [zeta ** i for i in range(U.w)]
    base = G.reduce_fraction(t0)
    tor_res = [G.reduce(z) for z in tors]
    if U.fundamental is None:
        ks = [0]
    else:
        K = G.order
        ks = sorted(range(-K, K + 1), key=lambda k: (abs(k), k < 0))
        eps_res = G.reduce(U.fundamental)
    for k in ks:
        ek = G.power(eps_res, k) if k else G.identity
        for i, zr in enumerate(tor_res):
            if G.mul(G.mul(base, ek), zr) in gamma:
                u = tors[i] * (U.fundamental ** k if k else sys.field(1))
                t = t0 * u
                assert x.scale(t) == target
                return t
    raise ValueError("ideals lie in different classes")
