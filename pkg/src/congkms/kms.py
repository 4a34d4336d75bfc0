"""Gibbs ensembles on truncated spectra, orbit traces and the evaluation of
KMS states through the groupoid measure formula."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import log
from typing import Sequence

import mpmath
import numpy as np

from . import latticevec as lv
from .congruence import SystemDescriptor, monoid_contains, transporter
from .dirichlet import ScaledSeries, build_zeta, class_counts, tail_bound
from .field import Element, format_element
from .ideals import Ideal, enumerate_ideals
from .toral import FiniteOrbit, FixedPointSet, ToralAction, apply_mod1, orbit_of, toral_action

CRITICAL_BETA = 2


# --------------------------------------------------------------------------
# spectra and Gibbs states


@dataclass(frozen=True)
class SpectrumMultiset:
    """Eigenvalues h = log(ratio) of a Hamiltonian with multiplicities.

    Ratios are exact positive rationals when possible (h = log of a norm
    quotient); `critical` is the abscissa below which e^{-βH} is not trace class.
    """
    levels: tuple[tuple[object, int], ...]  # (ratio e^h, multiplicity), ratio ascending
    X: int | None = None
    critical: float = 0.0
    label: str = ""

    def __post_init__(self):
        if not self.levels:
            raise ValueError("empty spectrum")
        ratios = [r for r, _ in self.levels]
        if ratios[0] != 1:
            raise ValueError("lowest level must be h = 0")
        if any(b <= a for a, b in zip(ratios, ratios[1:])):
            raise ValueError("levels must be strictly increasing")
        if any(m < 1 for _, m in self.levels):
            raise ValueError("multiplicities must be ≥ 1")

    @staticmethod
    def from_ratios(ratios: dict, **kw) -> "SpectrumMultiset":
        lv_ = sorted((Fraction(r) if not isinstance(r, float) else r, int(m)) for r, m in ratios.items())
        return SpectrumMultiset(tuple(lv_), **kw)

    @staticmethod
    def from_energies(energies: dict, **kw) -> "SpectrumMultiset":
        """Levels given as real h ≥ 0 (no exactness)."""
        lv_ = sorted((mpmath.e ** mpmath.mpf(h), int(m)) for h, m in energies.items())
        lv_[0] = (1, lv_[0][1]) if lv_[0][0] == 1 else lv_[0]
        return SpectrumMultiset(tuple(lv_), **kw)

    @property
    def energies(self) -> list[float]:
        return [float(mpmath.log(r)) for r, _ in self.levels]

    @property
    def exact(self) -> bool:
        return all(isinstance(r, (int, Fraction)) for r, _ in self.levels)

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.levels)

    def as_dict(self) -> dict:
        return {"levels": [{"h": float(mpmath.log(r)), "ratio": str(r), "multiplicity": m}
                           for r, m in self.levels],
                "X": self.X, "critical": self.critical, "label": self.label}


def _boltzmann(ratio, beta):
    """e^{-βh} = ratio^{-β}, exact when both are rational with β integral."""
    if isinstance(ratio, (int, Fraction)) and isinstance(beta, (int, Fraction)) \
            and Fraction(beta).denominator == 1:
        return Fraction(ratio) ** -int(beta)
    return mpmath.power(mpmath.mpf(ratio) if not isinstance(ratio, Fraction)
                        else mpmath.mpf(ratio.numerator) / ratio.denominator, -mpmath.mpf(beta))


@dataclass(frozen=True)
class GibbsState:
    beta: object
    Z: object
    weights: tuple  # per level: a_k e^{-βh_k}/Z

    def as_dict(self):
        return {"beta": float(self.beta), "Z": str(self.Z) if isinstance(self.Z, Fraction) else float(self.Z),
                "Z_float": float(self.Z), "weights": [float(w) for w in self.weights]}


def gibbs_partition(spec: SpectrumMultiset, beta) -> GibbsState:
    """Z = Σ a_k e^{-β h_k} and the normalized level weights."""
    if beta <= 0:
        raise ValueError("β must be positive")
    terms = [m * _boltzmann(r, beta) for r, m in spec.levels]
    Z = sum(terms, Fraction(0)) if all(isinstance(t, Fraction) for t in terms) else mpmath.fsum(terms)
    return GibbsState(beta, Z, tuple(t / Z for t in terms))


def quasi_family(spec: SpectrumMultiset, beta0, beta) -> GibbsState:
    """The Gibbs state at β of the Hamiltonian fixed by a state at β0.

    The spectrum (hence the level set) does not depend on β; only weights move.
    """
    for b in (beta0, beta):
        if b <= spec.critical:
            raise ValueError(f"β = {b} is at or below the critical value {spec.critical}")
    ref = gibbs_partition(spec, beta0)
    st = gibbs_partition(spec, beta)
    assert len(ref.weights) == len(st.weights) == len(spec.levels)
    return st


@dataclass(frozen=True)
class GroundLimit:
    level_weights: tuple  # limit weights per level (1 on level 0)
    vector_weight: Fraction  # weight of each ground vector
    gap: float  # Z(β) − a_0
    bound: float  # e^{-βd_1} Σ_{k≥1} a_k e^{-β0(d_k − d_1)}
    holds: bool

    def as_dict(self):
        return {"level_weights": [float(w) for w in self.level_weights],
                "vector_weight": str(self.vector_weight), "gap": self.gap, "bound": self.bound,
                "holds": self.holds}


def ground_limit(spec: SpectrumMultiset, beta, beta0=None) -> GroundLimit:
    """β → ∞ limit (uniform on the ground space) and the rate bound at β ≥ β0."""
    beta0 = beta if beta0 is None else beta0
    if beta < beta0:
        raise ValueError("need β ≥ β0")
    a0 = spec.levels[0][1]
    limit = tuple([Fraction(1)] + [Fraction(0)] * (len(spec.levels) - 1))
    if len(spec.levels) == 1:
        return GroundLimit(limit, Fraction(1, a0), 0.0, 0.0, True)
    with mpmath.workdps(40):
        beta_m, beta0_m = mpmath.mpf(beta), mpmath.mpf(beta0)
        h = [mpmath.log(mpmath.mpf(r) if not isinstance(r, Fraction)
                        else mpmath.mpf(r.numerator) / r.denominator) for r, _ in spec.levels]
        gap = mpmath.fsum(m * mpmath.exp(-beta_m * hk) for (r, m), hk in zip(spec.levels[1:], h[1:]))
        d1 = h[1]
        bound = mpmath.exp(-beta_m * d1) * mpmath.fsum(
            m * mpmath.exp(-beta0_m * (hk - d1)) for (r, m), hk in zip(spec.levels[1:], h[1:]))
        holds = bool(gap <= bound * (1 + mpmath.mpf(10) ** -30))
    return GroundLimit(limit, Fraction(1, a0), float(gap), float(bound), holds)


def liouville_spectrum(spec: SpectrumMultiset, cutoff) -> list[tuple[float, object, int]]:
    """{h_j − h_k : |·| ≤ cutoff} as (value, e^{value}, multiplicity), ascending."""
    if cutoff < 0:
        raise ValueError("cutoff must be ≥ 0")
    h = spec.energies
    out: dict = {}
    for j, (rj, mj) in enumerate(spec.levels):
        for k, (rk, mk) in enumerate(spec.levels):
            if abs(h[j] - h[k]) <= cutoff + 1e-12:
                key = rj / rk if spec.exact else round(h[j] - h[k], 12)
                out[key] = out.get(key, 0) + mj * mk
    rows = []
    for key, m in out.items():
        val = float(mpmath.log(key.numerator) - mpmath.log(key.denominator)) if isinstance(key, Fraction) else key
        rows.append((val, key, m))
    rows.sort(key=lambda t: t[0])
    return rows


# --------------------------------------------------------------------------
# class data shared by both evaluation routes


def class_ideals(sys: SystemDescriptor, kappa, X: int) -> list[Ideal]:
    """Integral ideals of class κ with norm ≤ X, by norm then HNF."""
    kappa = tuple(kappa)
    cache = sys.__dict__.setdefault("_class_ideals", {})
    key = (kappa, X)
    if key not in cache:
        cd = sys.class_data
        out = []
        for n, ideals in enumerate_ideals(sys.field, X, sys.modulus.m0).items():
            out.extend(I for I in ideals if cd.class_of(I) == kappa)
        cache[key] = out
    return cache[key]


def class_transporter(sys: SystemDescriptor, ideal: Ideal, target: Ideal) -> Element:
    cache = sys.__dict__.setdefault("_transporters", {})
    key = (ideal, target)
    if key not in cache:
        cache[key] = transporter(ideal, target, sys)
    return cache[key]


def class_representative(sys: SystemDescriptor, kappa) -> Ideal:
    return sys.class_data.representatives[tuple(kappa)]


def hamiltonian_spectrum(sys: SystemDescriptor, kappa, X: int, orbit_size: int = 1) -> SpectrumMultiset:
    """Levels log(N(𝔞)/N̲(κ)) with multiplicity N(𝔞)·|O|, aggregated over equal norms."""
    cc = class_counts(sys, X)
    row = cc.row(kappa)
    nmin = sys.class_data.min_norm(kappa)
    if nmin > X:
        raise ValueError(f"no ideal of norm ≤ {X} in class {list(kappa)}")
    levels = tuple((Fraction(int(n), nmin), int(row[n]) * int(n) * orbit_size)
                   for n in np.nonzero(row)[0] if n >= 1)
    return SpectrumMultiset(levels, X, float(CRITICAL_BETA), f"H_{list(kappa)}")


def partition_function(sys: SystemDescriptor, kappa, orbit, X: int | None = None) -> ScaledSeries:
    """|O|·N̲(κ)^s·ζ_κ(s − 1) for a finite orbit O (FiniteOrbit or its size)."""
    if orbit is None or (isinstance(orbit, FixedPointSet) and not orbit.finite):
        raise ValueError("infinite orbit: the state is of type II and has no partition function")
    size = orbit.size if isinstance(orbit, FiniteOrbit) else int(orbit)
    if size < 1:
        raise ValueError("orbit size must be ≥ 1")
    base = build_zeta(sys, "partial", X, kappa)
    return ScaledSeries(sys.class_data.min_norm(kappa), size, base, shift=1)


# --------------------------------------------------------------------------
# traces from finite orbits


@dataclass(frozen=True)
class IsotropyCharacter:
    """χ on ⟨ζ^{t0}⟩ × ⟨ζ^{i0}η^{k0}⟩: χ(ζ^{t0}) = e(torsion_index/(w/t0)), χ(ζ^{i0}η^{k0}) = e(free_phase)."""
    torsion_index: int = 0
    free_phase: Fraction = Fraction(0)


@dataclass(frozen=True)
class OrbitTrace:
    """The extremal trace τ_{O,χ} on C*(𝔞_κ ⋊ R*_{m,Γ})."""
    ideal: Ideal  # 𝔞_κ
    action: ToralAction
    orbit: FiniteOrbit
    chi: IsotropyCharacter
    w: int

    @property
    def size(self) -> int:
        return self.orbit.size

    def contains(self, g: tuple[int, int]) -> bool:
        return self.orbit.isotropy_contains(g[0], g[1], self.w)

    def chi_phase(self, g: tuple[int, int]) -> Fraction:
        """χ(g) = e^{2πi·phase} for g = ζ^i η^k in the isotropy."""
        i, k = g
        o = self.orbit
        b = 0 if o.free_power is None else k // o.free_power
        j = (i - b * o.free_shift) // o.torsion_step
        m = self.w // o.torsion_step
        return (Fraction(self.chi.torsion_index * j, m) + b * self.chi.free_phase) % 1

    def point_numerators(self) -> tuple[np.ndarray, int]:
        D = 1
        for p in self.orbit.points:
            for c in p:
                D = D * c.denominator // np.gcd(D, c.denominator)
        P = np.array([[int(c * D) for c in p] for p in self.orbit.points], dtype=np.int64)
        return P, int(D)

    def value(self, r_coords: Sequence[int], g: tuple[int, int], dps: int = 30):
        """τ(u_{(r,g)}) exactly in phases, summed in mpmath."""
        if not self.contains(g):
            return mpmath.mpc(0)
        def e(q: Fraction):
            return mpmath.expjpi(2 * mpmath.mpf(q.numerator) / q.denominator)

        with mpmath.workdps(dps):
            s = mpmath.fsum(e(sum((p * c for p, c in zip(pt, r_coords)), Fraction(0)) % 1)
                            for pt in self.orbit.points)
            return e(self.chi_phase(g)) * s / self.size

    def values(self, rc: np.ndarray, g: tuple[int, int]) -> np.ndarray:
        """Vectorized τ(u_{(r,g)}) for coordinate columns rc (dim, n)."""
        n = rc.shape[1]
        if not self.contains(g):
            return np.zeros(n, dtype=complex)
        P, D = self.point_numerators()
        idx = (P @ (rc % D)) % D
        s = np.exp(2j * np.pi * idx / D).sum(axis=0)
        return np.exp(2j * np.pi * float(self.chi_phase(g))) * s / self.size


def make_orbit_trace(sys: SystemDescriptor, kappa, point=None, chi: IsotropyCharacter | None = None) -> OrbitTrace:
    """τ_{O,χ} for the orbit of `point` in the dual torus of 𝔞_κ (default: 0)."""
    ideal = class_representative(sys, kappa)
    act = toral_action(sys, ideal)
    x0 = tuple(Fraction(0) for _ in range(act.dim)) if point is None else tuple(Fraction(c) % 1 for c in point)
    orb = orbit_of(act, x0)
    return OrbitTrace(ideal, act, orb, chi or IsotropyCharacter(), sys.units.torsion_order)


def unit_exponents(sys: SystemDescriptor, g: Element) -> tuple[int, int] | None:
    """(i, k) with g = ζ^i η^k in R*_{m,Γ}, or None when g is not in it."""
    if not g.is_integral() or abs(g.norm()) != 1:
        return None
    try:
        return sys.units.exponents(g)
    except ValueError:
        return None


def trace_from_orbit(sys: SystemDescriptor, trace: OrbitTrace, r: Element, g: Element, dps: int = 30):
    """τ_{O,χ}(u_{(r,g)}) for r ∈ 𝔞_κ and g ∈ R*_{m,Γ}."""
    gi = unit_exponents(sys, g)
    if gi is None:
        raise ValueError(f"{format_element(g)} is not in R*_(m,Γ)")
    return trace.value(trace.ideal.coords(r), gi, dps)


def classify_type(descriptor) -> dict:
    """Factor types of the trace and of the induced KMS state."""
    if isinstance(descriptor, str):
        if descriptor != "haar":
            raise ValueError(f"unknown descriptor {descriptor!r}")
        return {"trace": "II_1", "state": "II_inf"}
    size = descriptor.size if isinstance(descriptor, (FiniteOrbit, OrbitTrace)) else int(descriptor)
    return {"trace": f"I_{size}", "state": "I_inf"}


# --------------------------------------------------------------------------
# monomials s_b* e_{y+𝔟} u^d s_c


@dataclass(frozen=True)
class MonomialSpec:
    b: Element
    y: Element
    ideal_b: Ideal
    d: Element
    c: Element

    @staticmethod
    def identity(sys: SystemDescriptor) -> "MonomialSpec":
        f = sys.field
        return MonomialSpec(f(1), f(0), Ideal.unit(f), f(0), f(1))

    def validate(self, sys: SystemDescriptor) -> None:
        for name in ("b", "c"):
            if not monoid_contains(getattr(self, name), sys):
                raise ValueError(f"{name} = {format_element(getattr(self, name))} is not in R_(m,Γ)")
        for name in ("y", "d"):
            if not getattr(self, name).is_integral():
                raise ValueError(f"{name} must be integral")
        if not self.ideal_b.is_integral:
            raise ValueError("𝔟 must be integral")
        if not sys.modulus.coprime_ideal(self.ideal_b):
            raise ValueError("𝔟 is not coprime to m0")

    @property
    def eigen_ratio(self) -> Fraction:
        """σ_t acts on the monomial by (N(c)/N(b))^{it}."""
        return Fraction(abs(self.c.norm())) / Fraction(abs(self.b.norm()))

    def word(self) -> list[tuple]:
        """Operator word, leftmost factor first."""
        return [("Sstar", self.b), ("E", (self.ideal_b, self.y)), ("U", self.d), ("S", self.c)]

    def adjoint_word(self) -> list[tuple]:
        """(s_b* e u^d s_c)* = s_c* u^{-d} e s_b."""
        return [("Sstar", self.c), ("U", -self.d), ("E", (self.ideal_b, self.y)), ("S", self.b)]

    def adjoint(self) -> "MonomialSpec":
        """The adjoint in normal form, using u^{-d} e_{y+𝔟} = e_{y-d+𝔟} u^{-d}."""
        return MonomialSpec(self.c, self.y - self.d, self.ideal_b, -self.d, self.b)

    def as_dict(self) -> dict:
        return {"b": format_element(self.b), "y": format_element(self.y),
                "ideal_b": list(self.ideal_b.hnf()[:3]), "d": format_element(self.d),
                "c": format_element(self.c)}

    def __str__(self):
        return (f"s_{format_element(self.b)}* e_({format_element(self.y)}+{list(self.ideal_b.hnf()[:3])}) "
                f"u^{format_element(self.d)} s_{format_element(self.c)}")


# --------------------------------------------------------------------------
# KMS values


@dataclass(frozen=True)
class KMSValue:
    value: complex
    tail_bound: float
    X: int
    beta: float
    label: str = ""

    def as_dict(self) -> dict:
        return {"monomial": self.label, "value_re": self.value.real, "value_im": self.value.imag,
                "tail_bound": self.tail_bound, "X": self.X, "beta": self.beta}


def check_beta(beta) -> None:
    if not beta > CRITICAL_BETA:
        raise ValueError(f"β = {beta} is outside (2, ∞)")


def truncated_zeta_shift(sys: SystemDescriptor, kappa, beta, X: int) -> tuple[float, float]:
    """(ζ_κ^{≤X}(β − 1), tail bound T(X) at β − 1)."""
    z = build_zeta(sys, "partial", X, kappa)
    n = np.arange(z.X + 1, dtype=float)
    n[0] = 1
    val = float((z.coefficients * n ** (1 - float(beta))).sum())
    return val, float(tail_bound(z, beta - 1))


def state_error(sys: SystemDescriptor, kappa, beta, X: int, nterms: int) -> float:
    """2T(X)/ζ_κ^{≤X}(β−1) plus a floating-point allowance for the finite sum."""
    zx, T = truncated_zeta_shift(sys, kappa, beta, X)
    return 2 * T / zx + 1e-15 * (nterms + 10)


def measure_eval(sys: SystemDescriptor, x: Element, a: Ideal, beta, kappa, X: int) -> tuple[float, float]:
    """μ_{β,κ}(V_{x+𝔞}) truncated at X, with an error bound for the truncation."""
    check_beta(beta)
    if not a.is_integral or not sys.modulus.coprime_ideal(a):
        raise ValueError("𝔞 must be integral and coprime to m0")
    na = a.inorm()
    cd = sys.class_data
    grp = cd.group
    kappa_c = grp.add(tuple(kappa), grp.neg(cd.class_of(a)))
    zx, T = truncated_zeta_shift(sys, kappa, beta, X)
    Xc = X // na
    if Xc >= 1:
        z = build_zeta(sys, "partial", X, kappa_c)
        n = np.arange(Xc + 1, dtype=float)
        n[0] = 1
        num = float((z.coefficients[:Xc + 1] * n ** (1 - float(beta))).sum())
    else:
        num = 0.0
    val = na ** (-float(beta)) * num / zx
    # numerator omits 𝔟 = 𝔞𝔠 with N(𝔟) > X; both sums are monotone in X
    tail_num = na ** (-float(beta)) * T
    err = (tail_num + val * T) / zx
    return val, err


def kms_eval_formula(sys: SystemDescriptor, mon: MonomialSpec, beta, kappa, trace: OrbitTrace, X: int) -> KMSValue:
    """φ_{β,κ,τ}(s_b* e_{y+𝔟} u^d s_c) from the measure-theoretic double sum."""
    check_beta(beta)
    mon.validate(sys)
    f = sys.field
    g = mon.c / mon.b
    gi = unit_exponents(sys, g)
    ideals = class_ideals(sys, kappa, X)
    zx = sum(I.inorm() ** (1 - float(beta)) for I in ideals)
    nterms = sum(I.inorm() for I in ideals)
    err = state_error(sys, kappa, beta, X, nterms)
    if gi is None:
        return KMSValue(0j, 0.0, X, float(beta), str(mon))
    aK = trace.ideal
    dcoef = lv.int_coords(mon.d)
    ycoef = lv.int_coords(mon.y)
    cb = mon.c - mon.b
    total = 0j
    for A in ideals:
        bA = A.scale(mon.b)
        if not mon.ideal_b.divides(bA):
            continue
        U, V = lv.residues(A)
        # d + c x − y ∈ 𝔟
        cu, cv = lv.mul(f, mon.c, U, V)
        m1 = lv.member(mon.ideal_b, cu + dcoef[0] - ycoef[0], cv + dcoef[1] - ycoef[1])
        # w = d + b x (g − 1) = d + (c − b) x ∈ b𝔞
        wu, wv = lv.mul(f, cb, U, V)
        wu, wv = wu + dcoef[0], wv + dcoef[1]
        sel = m1 & lv.member(bA, wu, wv)
        if not sel.any():
            continue
        t = class_transporter(sys, A, aK)
        # r = t_𝔞 · b^{-1} w ∈ 𝔞_κ
        L = lv.transfer_matrix(t / mon.b, bA, aK)
        rc = L @ lv.coords(bA, wu[sel], wv[sel])
        total += A.inorm() ** (-float(beta)) * trace.values(rc, gi).sum()
    return KMSValue(complex(total / zx), err, X, float(beta), str(mon))


# --------------------------------------------------------------------------
# random monomial suites


def monoid_elements(sys: SystemDescriptor, bound: int, limit: int = 40) -> list[Element]:
    """Small elements of R_{m,Γ} (coefficients bounded by `bound`), by norm."""
    f = sys.field
    out = []
    rng = range(-bound, bound + 1)
    cands = [f(u) for u in rng] if f.d is None else [f(u, v) for u in rng for v in rng]
    for e in cands:
        if e.is_zero():
            continue
        try:
            if monoid_contains(e, sys):
                out.append(e)
        except ValueError:
            continue
    out.sort(key=lambda e: (abs(e.norm()), str(e)))
    return out[:limit]


def random_monomials(sys: SystemDescriptor, count: int, rng: np.random.Generator,
                     unit_bias: float = 0.6) -> list[MonomialSpec]:
    """Monomials with small data; with probability `unit_bias` c = b·u for u ∈ R*_{m,Γ}."""
    f = sys.field
    mono = monoid_elements(sys, 3)
    small = monoid_elements(sys, 2, 12)
    ideals = [I for n, Is in enumerate_ideals(f, 12, sys.modulus.m0).items() for I in Is]
    units = sys.units
    out = []
    while len(out) < count:
        b = small[rng.integers(len(small))]
        if rng.random() < unit_bias:
            i = int(rng.integers(units.torsion_order))
            k = int(rng.integers(-1, 2)) if units.free_generator is not None else 0
            c = b * units.element(i, k)
        else:
            c = mono[rng.integers(len(mono))]
        bideal = ideals[rng.integers(len(ideals))]
        coeff = lambda: int(rng.integers(-4, 5))
        small_elt = lambda: f(coeff()) if f.d is None else f(coeff(), coeff())
        # d ∈ bR makes d + bx(g − 1) ∈ b𝔞 solvable for many 𝔞, and y ≡ d keeps
        # the 𝔟-congruence satisfiable at x = 0
        u = rng.random()
        d = f(0) if u < 0.25 else b * small_elt() if u < 0.6 else small_elt()
        y = d if rng.random() < 0.5 else small_elt()
        mon = MonomialSpec(b, y, bideal, d, c)
        try:
            mon.validate(sys)
        except ValueError:
            continue
        out.append(mon)
    return out
