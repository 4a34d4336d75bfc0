"""Minimal-state census, invariant extraction, Kronecker sets and system comparison."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .congruence import SystemDescriptor, transporter
from .dirichlet import (DirichletSeries, arithmetic_equivalence, build_zeta, recover_scale,
                        residue_estimate, residue_formula)
from .ideals import factor_rational_prime, primes_up_to
from .kms import partition_function
from .toral import fixed_points, toral_action

INFINITE = "inf"


@dataclass
class ClassComponents:
    kappa: tuple[int, ...]
    min_norm: int
    scale: int  # recovered from Z̃
    fixed_count: int | None  # None: the whole torus is fixed
    components: int
    residue: float  # A(X)/X of ζ_κ, a numerical witness only

    def as_dict(self) -> dict:
        return {"class": list(self.kappa), "min_norm": self.min_norm, "recovered_scale": self.scale,
                "fixed_count": INFINITE if self.fixed_count is None else self.fixed_count,
                "components": self.components, "residue_estimate": self.residue}


@dataclass
class CensusReport:
    component_count: int
    closed_form: int
    tor_order: int
    class_number: int
    fixed_count: int | None
    summed_series: DirichletSeries
    limit_at_infinity: int
    identity_holds: bool
    identity_mismatch: int | None  # first n where Σ Z̃ ≠ (tor·fixed)·n·aₙ(ζ_{K,m})
    per_class: list[ClassComponents]
    X: int

    @property
    def multiplier(self) -> int:
        return 1 if self.fixed_count is None else self.tor_order * self.fixed_count

    @property
    def formula_holds(self) -> bool:
        return self.component_count == self.closed_form

    def as_dict(self) -> dict:
        return {"component_count": self.component_count, "closed_form": self.closed_form,
                "formula_holds": self.formula_holds, "tor_order": self.tor_order,
                "class_number": self.class_number,
                "fixed_count": INFINITE if self.fixed_count is None else self.fixed_count,
                "limit_at_infinity": self.limit_at_infinity, "expected_limit": self.multiplier,
                "summed_identity_holds": self.identity_holds,
                "summed_identity_first_mismatch": self.identity_mismatch,
                "summed_series_head": {n: self.summed_series.a(n)
                                       for n in self.summed_series.support()[:12]},
                "minimality": "orbit size 1 (fixed points); per-class residues reported as witness",
                "per_class": [c.as_dict() for c in self.per_class], "X": self.X}


def _class_components(sys: SystemDescriptor, kappa) -> tuple[int | None, int]:
    """(fixed count, number of minimal components) for one class.

    With R*_{m,Γ} trivial every point is fixed and the set of minimal states
    over the class is one torus. Otherwise each of the finitely many fixed
    points carries the characters of ⟨ζ⟩ × ⟨η⟩: `tor` discrete choices, each
    times a circle when η exists.
    """
    act = toral_action(sys, sys.class_data.representatives[kappa])
    if act.trivial:
        return None, 1
    fp = fixed_points(act)
    if not fp.finite:
        raise AssertionError("nontrivial R*_(m,Γ) with an infinite fixed set")
    return fp.count, len(fp.representatives) * sys.units.torsion_order


def minimal_census(sys: SystemDescriptor, X: int | None = None) -> CensusReport:
    X = sys.truncation if X is None else X
    cd = sys.class_data
    units = sys.units
    per_class = []
    summed = np.zeros(X + 1, dtype=np.int64)
    fixed_counts = set()
    for kappa in cd.classes():
        fcount, comps = _class_components(sys, kappa)
        fixed_counts.add(fcount)
        Z = partition_function(sys, kappa, 1, X)
        k, red = recover_scale(Z)
        m = min(red.X, X)
        summed[:m + 1] += comps * red.coefficients[:m + 1]
        per_class.append(ClassComponents(kappa, cd.min_norm(kappa), k, fcount, comps,
                                         residue_estimate(Z.base).estimate))
    if len(fixed_counts) != 1:
        raise AssertionError(f"fixed-point counts differ between classes: {fixed_counts}")
    fcount = fixed_counts.pop()
    total = sum(c.components for c in per_class)
    if units.trivial:
        closed = cd.order
    else:
        closed = units.torsion_order * cd.order * fcount
    series = DirichletSeries(summed, "sum of reduced partition functions", "divisor", sys.field)
    mult = 1 if fcount is None else units.torsion_order * fcount
    zkm = build_zeta(sys, "modulus", X)
    n = np.arange(X + 1, dtype=np.int64)
    expected = mult * zkm.coefficients * n
    bad = np.nonzero(expected != summed)[0]
    return CensusReport(total, closed, units.torsion_order, cd.order, fcount, series,
                        int(summed[1]) if X >= 1 else 0, bad.size == 0,
                        int(bad[0]) if bad.size else None, per_class, X)


# --------------------------------------------------------------------------
# invariants


@dataclass
class InvariantRecord:
    class_number: int
    zeta_Km: DirichletSeries
    tor_times_fixed: int | None  # None: R*_{m,Γ} trivial
    zeta_trivial: DirichletSeries
    norm_prime_set: frozenset[int]
    X: int
    routes: dict = dc_field(default_factory=dict)

    def as_dict(self, head: int = 20) -> dict:
        return {"class_number": self.class_number,
                "zeta_Km_head": {n: self.zeta_Km.a(n) for n in self.zeta_Km.support()[:head]},
                "tor_times_fixed": INFINITE if self.tor_times_fixed is None else self.tor_times_fixed,
                "zeta_trivial_head": {n: self.zeta_trivial.a(n)
                                      for n in self.zeta_trivial.support()[:head]},
                "norm_prime_set": sorted(self.norm_prime_set), "X": self.X, "routes": self.routes}


def _from_census(sys: SystemDescriptor, census: CensusReport) -> dict:
    """Invariants read from the partition-function data alone."""
    X = census.X
    limit = census.limit_at_infinity
    if census.fixed_count is None:
        tf = None
        h = census.component_count
    else:
        tf = limit
        h = census.component_count // limit
    n = np.arange(X + 1, dtype=np.int64)
    n[0] = 1
    summed = census.summed_series.coefficients[:X + 1]
    if np.any(summed % (limit * n)):
        raise AssertionError("summed partition functions are not divisible by limit·n")
    dens = "unit" if sys.field.d is None else "divisor"
    zkm = DirichletSeries(summed // (limit * n), "zeta_K_m", dens, sys.field)
    # the unique Z̃ whose s→∞ limit is nonzero belongs to the class with N̲ = 1
    nonvanishing = []
    for kappa in sys.class_data.classes():
        Z = partition_function(sys, kappa, 1, X)
        _, red = recover_scale(Z)
        if red.a(1) != 0:
            nonvanishing.append(red)
    if len(nonvanishing) != 1:
        raise AssertionError("expected exactly one reduced partition function with a nonzero limit")
    red = nonvanishing[0]
    c = red.coefficients[:X + 1]
    triv = DirichletSeries(c // (red.a(1) * n[:len(c)]), "zeta_[R]", dens, sys.field)
    primes = frozenset(p for p in primes_up_to(X) if triv.a(p) != 0)
    return {"class_number": h, "zeta_Km": zkm, "tor_times_fixed": tf, "zeta_trivial": triv,
            "norm_prime_set": primes}


def _principal_in_monoid(sys: SystemDescriptor, P) -> bool:
    """Whether P = (α) with α ∈ R_{m,Γ}, by an explicit generator search."""
    try:
        transporter(P, type(P).unit(sys.field), sys)
    except ValueError:
        return False
    return True


def _direct(sys: SystemDescriptor, X: int) -> dict:
    """Invariants by enumeration, without the partition functions."""
    from .kms import class_ideals
    cd = sys.class_data
    units = sys.units
    zkm = build_zeta(sys, "modulus", X)
    triv_counts = np.zeros(X + 1, dtype=np.int64)
    for I in class_ideals(sys, cd.identity(), X):
        triv_counts[I.inorm()] += 1
    triv = DirichletSeries(triv_counts, "zeta_[R]", zkm.density, sys.field)
    if units.trivial:
        tf = None
    else:
        fp = fixed_points(toral_action(sys, type(cd.representatives[cd.identity()]).unit(sys.field)))
        tf = units.torsion_order * fp.count
    primes = set()
    for p in primes_up_to(X):
        for P, _, f in factor_rational_prime(sys.field, p).primes_above:
            if f == 1 and sys.modulus.coprime_ideal(P) and _principal_in_monoid(sys, P):
                primes.add(p)
                break
    return {"class_number": cd.order, "zeta_Km": zkm, "tor_times_fixed": tf, "zeta_trivial": triv,
            "norm_prime_set": frozenset(primes)}


def extract_invariants(sys: SystemDescriptor, X: int | None = None,
                       census: CensusReport | None = None) -> InvariantRecord:
    """All five invariants by both routes; any disagreement is an AssertionError."""
    X = sys.truncation if X is None else X
    census = census or minimal_census(sys, X)
    a = _from_census(sys, census)
    b = _direct(sys, X)
    diffs = [k for k in a if a[k] != b[k]]
    if diffs:
        raise AssertionError(f"invariant routes disagree on {diffs}")
    routes = {"partition_function_route": "census counts, summed reduced series, s→∞ limits",
              "direct_route": "class group order, modulus Euler product, fixed points at R, "
                              "ideal enumeration, generator search",
              "agree": True}
    return InvariantRecord(a["class_number"], a["zeta_Km"], a["tor_times_fixed"], a["zeta_trivial"],
                           a["norm_prime_set"], X, routes)


# --------------------------------------------------------------------------
# Kronecker sets and comparison


def kronecker_set(sys: SystemDescriptor, bound: int) -> set[int]:
    """Primes p ≤ bound outside supp(m0) with a degree-one prime 𝔭 | p of trivial class."""
    if bound > sys.truncation:
        raise ValueError(f"bound {bound} exceeds the truncation {sys.truncation}")
    cd = sys.class_data
    one = cd.identity()
    supp = sys.modulus.support_Q
    out = set()
    for p in primes_up_to(bound):
        if p in supp:
            continue
        for P, _, f in factor_rational_prime(sys.field, p).primes_above:
            if f == 1 and cd.class_of(P) == one:
                out.add(p)
                break
    return out


@dataclass
class ComparisonReport:
    bound: int
    equivalence: dict
    kronecker_only_A: list[int]
    kronecker_only_B: list[int]
    class_numbers: tuple[int, int]
    invariant_diff: dict
    note: str = ("necessary conditions only: agreement does not certify an isomorphism of the "
                 "systems, and Kronecker agreement is the symmetric difference below the bound")

    @property
    def all_agree(self) -> bool:
        return (self.equivalence["equivalent"] and not self.kronecker_only_A
                and not self.kronecker_only_B and self.class_numbers[0] == self.class_numbers[1]
                and not self.invariant_diff)

    def as_dict(self) -> dict:
        return {"bound": self.bound, "arithmetic_equivalence": self.equivalence,
                "kronecker_only_A": self.kronecker_only_A, "kronecker_only_B": self.kronecker_only_B,
                "kronecker_equal_below_bound": not (self.kronecker_only_A or self.kronecker_only_B),
                "class_numbers": list(self.class_numbers),
                "class_numbers_equal": self.class_numbers[0] == self.class_numbers[1],
                "invariant_diff": self.invariant_diff, "all_agree": self.all_agree, "note": self.note}


def _series_diff(a: DirichletSeries, b: DirichletSeries) -> int | None:
    m = min(a.X, b.X)
    bad = np.nonzero(a.coefficients[:m + 1] != b.coefficients[:m + 1])[0]
    return int(bad[0]) if bad.size else None


def compare_systems(A: SystemDescriptor, B: SystemDescriptor, bound: int) -> ComparisonReport:
    """Arithmetic equivalence, Kronecker sets, class numbers and invariant records."""
    if bound < 2:
        raise ValueError("bound must be ≥ 2")
    if bound > min(A.truncation, B.truncation):
        raise ValueError("insufficient truncation: bound exceeds X of a system")
    Xz = bound * bound
    zA = build_zeta(A, "modulus", Xz)
    zB = build_zeta(B, "modulus", Xz)
    eq = arithmetic_equivalence(zA, zB, bound, A.modulus.support_Q, B.modulus.support_Q).as_dict()
    kA, kB = kronecker_set(A, bound), kronecker_set(B, bound)
    rA, rB = extract_invariants(A), extract_invariants(B)
    diff = {}
    if rA.class_number != rB.class_number:
        diff["class_number"] = [rA.class_number, rB.class_number]
    if rA.tor_times_fixed != rB.tor_times_fixed:
        diff["tor_times_fixed"] = [rA.tor_times_fixed, rB.tor_times_fixed]
    for name in ("zeta_Km", "zeta_trivial"):
        n = _series_diff(getattr(rA, name), getattr(rB, name))
        if n is not None:
            diff[name] = {"first_index": n, "A": getattr(rA, name).a(n), "B": getattr(rB, name).a(n)}
    m = min(rA.X, rB.X)
    pa = {p for p in rA.norm_prime_set if p <= m}
    pb = {p for p in rB.norm_prime_set if p <= m}
    if pa != pb:
        diff["norm_prime_set"] = {"only_A": sorted(pa - pb), "only_B": sorted(pb - pa)}
    return ComparisonReport(bound, eq, sorted(kA - kB), sorted(kB - kA),
                            (rA.class_number, rB.class_number), diff)


def residue_report(sys: SystemDescriptor, X: int | None = None) -> dict:
    """Per-class residue estimates with the closed form under both unit conventions."""
    X = sys.truncation if X is None else X
    est = {str(list(k)): residue_estimate(build_zeta(sys, "partial", X, k)).as_dict()
           for k in sys.class_data.classes()}
    rf = residue_formula(sys)
    vals = [e["estimate"] for e in est.values()]
    spread = (max(vals) - min(vals)) / max(vals) if vals and max(vals) > 0 else 0.0
    return {"estimates": est, "relative_spread": spread, "formula": rf.as_dict(),
            "conventions_differ": abs(rf.stated - rf.alternative) > 1e-12 * abs(rf.alternative)}
