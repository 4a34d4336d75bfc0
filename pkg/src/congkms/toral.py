"""The action of R*_{m,Γ} on the dual torus of an ideal: fixed points and orbits.

Torus points are coordinate vectors mod 1 dual to the HNF basis of the ideal;
a unit u acts through the transpose of its multiplication matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Sequence

from .congruence import RestrictedUnits, SystemDescriptor
from .field import Element
from .ideals import Ideal
from .linalg import inverse_unimodular, smith_normal_form

Point = tuple[Fraction, ...]


def action_matrix(u: Element, ideal: Ideal) -> list[list[int]]:
    """Integer matrix of y ↦ u·y on the HNF basis of `ideal` (columns = images)."""
    if not u.is_integral() or abs(u.norm()) != 1:
        raise ValueError(f"{u} is not a unit")
    basis = ideal.basis()
    cols = [ideal.coords(u * e) for e in basis]
    n = len(basis)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(r) for r in zip(*m)]


def matpow(m: Sequence[Sequence[int]], k: int) -> list[list[int]]:
    n = len(m)
    if k < 0:
        return matpow(inverse_unimodular(m), -k)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [list(r) for r in m]
    while k:
        if k & 1:
            out = [[sum(out[i][l] * base[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        base = [[sum(base[i][l] * base[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        k >>= 1
    return out


def apply_mod1(m: Sequence[Sequence[int]], p: Point) -> Point:
    return tuple((sum(m[i][j] * p[j] for j in range(len(p)))) % 1 for i in range(len(m)))


@dataclass(frozen=True)
class ToralAction:
    """R*_{m,Γ} = ⟨ζ⟩ × ⟨η⟩ acting on the dual torus of `ideal`.

    `torsion_matrix` (dual action of ζ, order `torsion_order`) and
    `free_matrix` (dual action of η) are transposes of multiplication matrices.
    """
    ideal: Ideal
    torsion_order: int
    torsion_matrix: tuple
    free_matrix: tuple | None

    @property
    def dim(self) -> int:
        return len(self.torsion_matrix)

    @property
    def generator_matrices(self) -> list[list[list[int]]]:
        out = []
        if self.torsion_order > 1:
            out.append([list(r) for r in self.torsion_matrix])
        if self.free_matrix is not None:
            out.append([list(r) for r in self.free_matrix])
        return out

    @property
    def trivial(self) -> bool:
        return not self.generator_matrices

    def element_matrix(self, i: int, k: int) -> list[list[int]]:
        """Dual matrix of ζ^i η^k."""
        m = matpow([list(r) for r in self.torsion_matrix], i % self.torsion_order)
        if k and self.free_matrix is not None:
            f = matpow([list(r) for r in self.free_matrix], k)
            n = self.dim
            m = [[sum(m[a][l] * f[l][b] for l in range(n)) for b in range(n)] for a in range(n)]
        return m


def make_action(sys_units: RestrictedUnits, ideal: Ideal) -> ToralAction:
    tm = transpose(action_matrix(sys_units.torsion_generator, ideal))
    fm = None
    if sys_units.free_generator is not None:
        fm = tuple(tuple(r) for r in transpose(action_matrix(sys_units.free_generator, ideal)))
    return ToralAction(ideal, sys_units.torsion_order, tuple(tuple(r) for r in tm), fm)


def toral_action(sys: SystemDescriptor, ideal: Ideal) -> ToralAction:
    return make_action(sys.units, ideal)


@dataclass(frozen=True)
class FixedPointSet:
    finite: bool
    count: int | None
    representatives: tuple[Point, ...]


def fixed_points(act: ToralAction) -> FixedPointSet:
    """Joint solutions of (Aᵀ − I)θ ∈ ℤⁿ via the SNF of the stacked system."""
    mats = act.generator_matrices
    if not mats:
        return FixedPointSet(False, None, ())
    n = act.dim
    rows = []
    for m in mats:
        for i in range(n):
            rows.append([m[i][j] - int(i == j) for j in range(n)])
    d, _, v = smith_normal_form(rows)
    diag = [d[i][i] for i in range(n)]
    if any(x == 0 for x in diag):
        return FixedPointSet(False, None, ())
    pts = set()
    for js in product(*[range(x) for x in diag]):
        phi = [Fraction(j, x) for j, x in zip(js, diag)]
        theta = tuple(sum(v[i][k] * phi[k] for k in range(n)) % 1 for i in range(n))
        pts.add(theta)
    count = 1
    for x in diag:
        count *= x
    assert len(pts) == count
    return FixedPointSet(True, count, tuple(sorted(pts)))


@dataclass(frozen=True)
class FiniteOrbit:
    """An orbit with base point points[0] (its lexicographic minimum).

    `elements[j] = (i, k)` satisfies ζ^i η^k · points[0] = points[j] under the
    dual action; isotropy is ⟨ζ^{t0}, ζ^{i0} η^{k0}⟩ (no second generator
    when there is no free part).
    """
    points: tuple[Point, ...]
    elements: tuple[tuple[int, int], ...]
    torsion_step: int  # t0
    free_power: int | None  # k0
    free_shift: int  # i0

    @property
    def size(self) -> int:
        return len(self.points)

    def isotropy_contains(self, i: int, k: int, w: int) -> bool:
        if self.free_power is None:
            if k:
                return False
            return i % self.torsion_step == 0
        if k % self.free_power:
            return False
        b = k // self.free_power
        return (i - b * self.free_shift) % self.torsion_step == 0

    def isotropy(self) -> dict:
        return {"torsion_step": self.torsion_step, "free_power": self.free_power,
                "free_shift": self.free_shift}


def orbit_of(act: ToralAction, x0: Point) -> FiniteOrbit:
    """Orbit of a rational point, with group elements reaching each point."""
    w = act.torsion_order
    tm = [list(r) for r in act.torsion_matrix]
    fm = [list(r) for r in act.free_matrix] if act.free_matrix is not None else None
    fminv = inverse_unimodular(fm) if fm is not None else None
    seen = {x0: (0, 0)}
    order = [x0]
    q = 0
    while q < len(order):
        p = order[q]
        i, k = seen[p]
        steps = [(tm, (i + 1, k))]
        if fm is not None:
            steps += [(fm, (i, k + 1)), (fminv, (i, k - 1))]
        for m, el in steps:
            np_ = apply_mod1(m, p)
            if np_ not in seen:
                seen[np_] = (el[0] % w, el[1])
                order.append(np_)
        q += 1
    base = min(order)
    if base != x0:
        return orbit_of(act, base)
    pts = sorted(order)
    els = tuple(seen[p] for p in pts)
    # isotropy
    t0 = next(t for t in range(1, w + 1) if w % t == 0 and apply_mod1(act.element_matrix(t, 0), x0) == x0)
    k0, i0 = None, 0
    if fm is not None:
        k = 0
        found = False
        while not found:
            k += 1
            for i in range(t0):
                if apply_mod1(act.element_matrix(i, k), x0) == x0:
                    k0, i0, found = k, i, True
                    break
    orb = FiniteOrbit(tuple(pts), els, t0, k0, i0)
    expected = t0 * (k0 if k0 is not None else 1)
    assert expected == orb.size, (expected, orb.size)
    return orb


def _torsion_orbit_partition(act: ToralAction, N: int) -> list[list[tuple[int, ...]]]:
    mats = act.generator_matrices
    n = act.dim
    pts = list(product(range(N), repeat=n))
    seen = set()
    orbits = []
    for p in pts:
        if p in seen:
            continue
        orb = [p]
        seen.add(p)
        q = 0
        while q < len(orb):
            cur = orb[q]
            for m in mats:
                nxt = tuple(sum(m[i][j] * cur[j] for j in range(n)) % N for i in range(n))
                if nxt not in seen:
                    seen.add(nxt)
                    orb.append(nxt)
            q += 1
        orbits.append(orb)
    return orbits


def finite_orbits(act: ToralAction, N: int) -> list[FiniteOrbit]:
    """All orbits on the N-torsion points (ℤ/N)ⁿ, with isotropy."""
    if N < 1:
        raise ValueError("N must be ≥ 1")
    out = []
    for orb in _torsion_orbit_partition(act, N):
        x0 = min(tuple(Fraction(c, N) for c in p) for p in orb)
        out.append(orbit_of(act, x0))
    out.sort(key=lambda o: (o.size, o.points[0]))
    return out


def orbit_size_census(act: ToralAction, Nmax: int) -> list[int]:
    """Sorted set of orbit sizes realised by points of denominator ≤ Nmax."""
    sizes = set()
    for N in range(1, Nmax + 1):
        for orb in _torsion_orbit_partition(act, N):
            sizes.add(len(orb))
    return sorted(sizes)


def point_character_phase(point: Point, coords: Sequence[int]) -> Fraction:
    """⟨θ, coords⟩ mod 1: the character θ evaluated on an element (as a phase)."""
    return sum((p * c for p, c in zip(point, coords)), Fraction(0)) % 1
