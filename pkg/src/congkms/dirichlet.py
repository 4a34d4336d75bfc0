"""Truncated Dirichlet series: partial zeta functions, evaluation with tail
bounds, residues, scale recovery and Euler-factor deconvolution."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import reduce
from math import comb, gcd, log, pi, sqrt
from typing import Sequence

import mpmath
import numpy as np

from .congruence import SystemDescriptor
from .field import Field
from .ideals import _omega_roots_mod, factor_rational_prime, primes_up_to

WHICH = ("partial", "modulus", "trivial_class", "dedekind")


@dataclass
class DirichletSeries:
    """Σ_{n ≤ X} aₙ n^{-s} with exact non-negative integer coefficients.

    `density` is "unit" when aₙ ≤ 1 for all n (series over ℚ) and "divisor"
    when aₙ ≤ τ(n) (ideal counts in a quadratic field); it selects the tail bound.
    """
    coefficients: np.ndarray  # index n, entry 0 unused
    label: str = ""
    density: str = "divisor"
    field: Field | None = None

    def __post_init__(self):
        c = np.asarray(self.coefficients)
        if c.ndim != 1 or len(c) < 2:
            raise ValueError("need coefficients for 1 ≤ n ≤ X")
        if (c < 0).any():
            raise ValueError("negative coefficient")
        self.coefficients = c

    @property
    def X(self) -> int:
        return len(self.coefficients) - 1

    def a(self, n: int) -> int:
        return int(self.coefficients[n]) if 1 <= n <= self.X else 0

    def support(self) -> list[int]:
        return [int(n) for n in np.nonzero(self.coefficients)[0] if n >= 1]

    def as_dict(self) -> dict[int, int]:
        return {n: int(self.coefficients[n]) for n in self.support()}

    def partial_sum(self, x: int) -> int:
        return int(self.coefficients[1:min(x, self.X) + 1].sum())

    def truncate(self, X: int) -> "DirichletSeries":
        return DirichletSeries(self.coefficients[:X + 1].copy(), self.label, self.density, self.field)

    def __add__(self, other: "DirichletSeries") -> "DirichletSeries":
        X = min(self.X, other.X)
        dens = "unit" if self.density == other.density == "unit" else "divisor"
        return DirichletSeries(self.coefficients[:X + 1] + other.coefficients[:X + 1],
                               f"{self.label}+{other.label}", dens, self.field)

    def scaled(self, k: int) -> "DirichletSeries":
        """Coefficients multiplied by a positive integer (bound scales with it)."""
        return DirichletSeries(self.coefficients * k, f"{k}·{self.label}", self.density, self.field)

    def __eq__(self, other):
        if not isinstance(other, DirichletSeries):
            return NotImplemented
        return self.X == other.X and bool(np.array_equal(self.coefficients, other.coefficients))

    def max_ratio(self) -> int:
        """Smallest integer c with aₙ ≤ c·(density bound) on the stored range."""
        c = self.coefficients[1:]
        if self.density == "unit":
            return int(c.max()) if len(c) else 0
        tau = divisor_counts(self.X)[1:]
        return int(np.ceil((c / tau).max()))


def divisor_counts(X: int) -> np.ndarray:
    tau = np.zeros(X + 1, dtype=np.int64)
    for d in range(1, X + 1):
        tau[d::d] += 1
    return tau


# --------------------------------------------------------------------------
# construction


def prime_ideal_hnfs(field: Field, X: int):
    """(norm, p, (a, b, c)) for the prime ideals of norm ≤ X."""
    for p in primes_up_to(X):
        if field.d is None:
            yield p, p, (p, 0, 1)
            continue
        roots = _omega_roots_mod(field, p)
        if roots:
            for r in roots:
                yield p, p, (p, (-r) % p, 1)
        elif p * p <= X:
            yield p * p, p, (p, 0, p)


def _accumulate(A: np.ndarray, q: int, src_rows: np.ndarray | None) -> None:
    """Multiply the class-graded count array by (1 − [𝔭] q^{-s})^{-1} in place.

    Blocks [q^k, q^{k+1}) of sources are final before their targets are touched.
    """
    X = A.shape[1] - 1
    lo = 1
    while lo * q <= X:
        hi = min(lo * q, X // q + 1)
        if src_rows is None:
            A[:, q * lo:q * hi:q] += A[:, lo:hi]
        else:
            A[:, q * lo:q * hi:q] += A[src_rows, lo:hi]
        lo = hi


@dataclass
class ClassCounts:
    """aₙ(κ) for every class κ of the generalized class group, 1 ≤ n ≤ X."""
    classes: list[tuple[int, ...]]
    counts: np.ndarray  # shape (h, X + 1)
    X: int

    def row(self, kappa) -> np.ndarray:
        return self.counts[self.classes.index(tuple(kappa))]


def class_counts(sys: SystemDescriptor, X: int) -> ClassCounts:
    """Integral ideals coprime to m0, counted by norm and generalized class."""
    cache = sys.__dict__.setdefault("_class_counts", {})
    for Xc, cc in cache.items():
        if Xc >= X:
            return ClassCounts(cc.classes, cc.counts[:, :X + 1], X)
    f = sys.field
    cd = sys.class_data
    grp = cd.group
    classes = [tuple(c) for c in grp.elements()]
    index = {c: i for i, c in enumerate(classes)}
    h = len(classes)
    bad = {P.hnf()[:3] for P in sys.modulus.primes}
    A = np.zeros((h, X + 1), dtype=np.int64)
    A[index[tuple(grp.identity())], 1] = 1
    shift_rows: dict[tuple, np.ndarray] = {}
    for q, p, hnf in prime_ideal_hnfs(f, X):
        if hnf in bad:
            continue
        c = cd.class_of_hnf(*hnf)
        if h == 1:
            _accumulate(A, q, None)
            continue
        rows = shift_rows.get(c)
        if rows is None:
            neg = grp.neg(c)
            rows = np.array([index[grp.add(k, neg)] for k in classes])
            shift_rows[c] = rows
        _accumulate(A, q, rows)
    cc = ClassCounts(classes, A, X)
    cache[X] = cc
    return cc


def dedekind_counts(field: Field, X: int, skip=frozenset()) -> np.ndarray:
    """Ideal counts by norm, omitting the prime ideals whose HNF lies in `skip`."""
    A = np.zeros((1, X + 1), dtype=np.int64)
    A[0, 1] = 1
    for q, p, hnf in prime_ideal_hnfs(field, X):
        if hnf not in skip:
            _accumulate(A, q, None)
    return A[0]


def build_zeta(sys: SystemDescriptor, which: str, X: int | None = None, kappa=None) -> DirichletSeries:
    """ζ_κ ("partial"), ζ_{K,m} ("modulus"), ζ_{[R]} ("trivial_class") or ζ_K ("dedekind")."""
    if which not in WHICH:
        raise ValueError(f"unknown series {which!r}; expected one of {WHICH}")
    X = sys.truncation if X is None else X
    if X < 1:
        raise ValueError("truncation must be ≥ 1")
    f = sys.field
    dens = "unit" if f.d is None else "divisor"
    if which == "dedekind":
        return DirichletSeries(dedekind_counts(f, X), "zeta_K", dens, f)
    if which == "modulus":
        skip = frozenset(P.hnf()[:3] for P in sys.modulus.primes)
        return DirichletSeries(dedekind_counts(f, X, skip), "zeta_K_m", dens, f)
    cc = class_counts(sys, X)
    if which == "trivial_class":
        kappa = sys.class_data.identity()
        return DirichletSeries(cc.row(kappa).copy(), "zeta_[R]", dens, f)
    if kappa is None:
        raise ValueError("partial series needs a class")
    return DirichletSeries(cc.row(kappa).copy(), f"zeta_{list(kappa)}", dens, f)


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Evaluation:
    value: object  # mpmath number
    tail_bound: object
    X: int
    s: float

    def as_dict(self) -> dict:
        return {"value": float(self.value), "value_str": mpmath.nstr(self.value, 20),
                "tail_bound": float(self.tail_bound), "X": self.X, "s": self.s}


def tail_bound(series: DirichletSeries, s) -> object:
    """Upper bound for Σ_{n > X} aₙ n^{-s}.

    unit density: ∫_X^∞ t^{-s} dt. divisor density: partial summation with
    Σ_{n ≤ t} τ(n) ≤ t(log t + 1), giving s·X^{1−s}((log X + 1)/(s−1) + 1/(s−1)²).
    Scaled series carry their multiplier through `max_ratio`.
    """
    X = mpmath.mpf(series.X)
    s = mpmath.mpf(s)
    c = max(series.max_ratio(), 1)
    if series.density == "unit":
        return c * X ** (1 - s) / (s - 1)
    return c * s * X ** (1 - s) * ((mpmath.log(X) + 1) / (s - 1) + 1 / (s - 1) ** 2)


def evaluate(series: DirichletSeries, s, dps: int = 30) -> Evaluation:
    if s <= 1:
        raise ValueError(f"s = {s} is at or below the abscissa of convergence")
    with mpmath.workdps(dps):
        sm = mpmath.mpf(s)
        terms = [int(series.coefficients[n]) * mpmath.power(n, -sm) for n in series.support()]
        val = mpmath.fsum(terms)
        tb = tail_bound(series, sm) + mpmath.mpf(10) ** (-dps + 3) * (1 + abs(val))
        return Evaluation(+val, +tb, series.X, float(s))


def limit_at_infinity(series: DirichletSeries) -> int:
    return series.a(1)


# --------------------------------------------------------------------------
# residues


@dataclass(frozen=True)
class ResidueEstimate:
    X: int
    estimate: float  # A(X)/X
    half_estimate: float  # A(X/2)/(X/2)

    def as_dict(self):
        return {"X": self.X, "estimate": self.estimate, "estimate_at_half": self.half_estimate}


def residue_estimate(series: DirichletSeries) -> ResidueEstimate:
    X = series.X
    h = max(X // 2, 1)
    return ResidueEstimate(X, series.partial_sum(X) / X, series.partial_sum(h) / h)


@dataclass(frozen=True)
class ResidueFormula:
    stated: float  # w_m = roots of unity in R*_{m,1}
    alternative: float  # w_m replaced by the roots of unity of K
    factors: dict

    def as_dict(self):
        return {"stated_convention": self.stated, "field_roots_convention": self.alternative,
                "factors": self.factors}


def residue_formula(sys: SystemDescriptor) -> ResidueFormula:
    """Closed-form residue at 1 of a partial zeta function, under two readings of w_m."""
    f = sys.field
    U = f.units
    inv = sys.class_data.residue_invariants
    reg = 1.0 if U.fundamental is None else float(U.regulator)
    num = 2 ** f.real_places * (2 * pi) ** f.complex_places * reg * inv["unit_index"]
    abs_d = abs(f.discriminant) if f.d is not None else 1
    base = sys.modulus.m0.inorm() * 2 ** sys.modulus.r0 * sqrt(abs_d)
    stated = inv["gamma_bar"] * num / (inv["w_m"] * base)
    alt = inv["gamma_bar"] * num / (U.w * base)
    factors = {"gamma_bar": inv["gamma_bar"], "r": f.real_places, "s": f.complex_places,
               "regulator": reg, "unit_index": inv["unit_index"], "w_m": inv["w_m"], "w_K": U.w,
               "N_m0": sys.modulus.m0.inorm(), "r0": sys.modulus.r0, "abs_D": abs_d}
    return ResidueFormula(stated, alt, factors)


# --------------------------------------------------------------------------
# scaled series and scale recovery


@dataclass
class ScaledSeries:
    """multiplier · scale^s · Σ aₙ n^{-(s - shift)} (shift = 1 for partition functions)."""
    scale: int
    multiplier: int
    base: DirichletSeries
    shift: int = 1

    def exponents(self) -> list[tuple[float, int]]:
        """(log(n/scale), coefficient) pairs: Σ c·e^{-sλ}."""
        return [(log(n / self.scale), self.multiplier * self.base.a(n) * n ** self.shift)
                for n in self.base.support()]

    def evaluate(self, s, dps: int = 30) -> Evaluation:
        with mpmath.workdps(dps):
            inner = evaluate(self.base, mpmath.mpf(s) - self.shift, dps)
            fac = self.multiplier * mpmath.power(self.scale, mpmath.mpf(s))
            return Evaluation(fac * inner.value, fac * inner.tail_bound, self.base.X, float(s))


def recover_scale(z: ScaledSeries) -> tuple[int, DirichletSeries]:
    """Smallest k with k^{-s}·Z(s) a Dirichlet series, and that series.

    Z(s) = Σ cₙ (n/N)^{-s}; k^{-s}Z(s) = Σ cₙ (k·n/N)^{-s} needs N | k·n for
    every n in the support, so k = lcm of N/gcd(N, n).
    """
    supp = z.base.support()
    if not supp:
        raise ValueError("empty series")
    N = z.scale
    k = reduce(lambda acc, n: acc * (N // gcd(N, n)) // gcd(acc, N // gcd(N, n)), supp, 1)
    X = z.base.X * k // N
    coeffs = np.zeros(X + 1, dtype=np.int64)
    for n in supp:
        m = k * n // N
        coeffs[m] += z.multiplier * z.base.a(n) * n ** z.shift
    red = DirichletSeries(coeffs, f"reduced({z.base.label})", "divisor", z.base.field)
    red.density = z.base.density
    red.__dict__["_shift"] = z.shift
    return k, red


def rescale(k: int, reduced: DirichletSeries, multiplier: int, shift: int = 1) -> ScaledSeries:
    """Inverse of `recover_scale` when the scale is k: Z̃ → Z."""
    X = reduced.X
    coeffs = np.zeros(X + 1, dtype=np.int64)
    for m in reduced.support():
        c = reduced.a(m)
        if c % (multiplier * m ** shift):
            raise ValueError("coefficients not divisible by multiplier·n^shift")
        coeffs[m] = c // (multiplier * m ** shift)
    base = DirichletSeries(coeffs, reduced.label, reduced.density, reduced.field)
    return ScaledSeries(k, multiplier, base, shift)


# --------------------------------------------------------------------------
# Euler factor deconvolution and arithmetic equivalence


def _poly_mul(a: Sequence[int], b: Sequence[int], F: int) -> list[int]:
    out = [0] * (F + 1)
    for i, x in enumerate(a[:F + 1]):
        if x:
            for j, y in enumerate(b[:F + 1 - i]):
                out[i + j] += x * y
    return out


def _one_minus_tg_pow(g: int, b: int, F: int, inverse: bool = False) -> list[int]:
    """(1 − t^g)^b, or (1 − t^g)^{-b} when inverse, truncated at degree F."""
    out = [0] * (F + 1)
    for j in range(F // g + 1):
        c = comb(b + j - 1, j) if inverse else (-1) ** j * comb(b, j)
        out[g * j] = c
    return out


def splitting_deconvolution(p: int, a_coeffs: Sequence[int], F: int | None = None) -> list[int]:
    """Inertia degrees f (with multiplicity) from the local factor Σ a_{p^f} t^f."""
    a = [int(x) for x in a_coeffs]
    F = len(a) - 1 if F is None else F
    if len(a) < F + 1 or a[0] != 1:
        raise ValueError("need a_{p^0} = 1 and coefficients up to p^F")
    b = [0] * (F + 1)
    cur = a[:F + 1]
    for f in range(1, F + 1):
        bf = cur[f]
        if bf < 0:
            raise ValueError(f"negative multiplicity at p={p}, f={f}: not an Euler factor")
        b[f] = bf
        if bf:
            cur = _poly_mul(cur, _one_minus_tg_pow(f, bf, F), F)
    check = [1] + [0] * F
    for g in range(1, F + 1):
        if b[g]:
            check = _poly_mul(check, _one_minus_tg_pow(g, b[g], F, inverse=True), F)
    if check != a[:F + 1]:
        raise ValueError(f"reconvolution mismatch at p={p}: not an Euler factor")
    return [f for f in range(1, F + 1) for _ in range(b[f])]


def local_coefficients(series: DirichletSeries, p: int) -> list[int]:
    out = [1]
    q = p
    while q <= series.X:
        out.append(series.a(q))
        q *= p
    return out


def splitting_types(series: DirichletSeries, bound: int, exclude: frozenset = frozenset()) -> dict[int, list[int]]:
    if bound > series.X:
        raise ValueError(f"bound {bound} exceeds truncation {series.X}")
    return {p: splitting_deconvolution(p, local_coefficients(series, p))
            for p in primes_up_to(bound) if p not in exclude}


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    witness: int | None
    compared: int
    details: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {"equivalent": self.equivalent, "witness": self.witness,
                "primes_compared": self.compared, **self.details}


def arithmetic_equivalence(zK: DirichletSeries, zL: DirichletSeries, bound: int,
                           support_K=frozenset(), support_L=frozenset()) -> EquivalenceVerdict:
    """Compare recovered splitting types at p ≤ bound outside both supports.

    Types are read from the prime powers p^f ≤ X available in both series, so
    the comparison is of the truncated local factors.
    """
    if bound > min(zK.X, zL.X):
        raise ValueError("bound exceeds truncation")
    skip = frozenset(support_K) | frozenset(support_L)
    tK = splitting_types(zK, bound, skip)
    tL = splitting_types(zL, bound, skip)
    for p in sorted(tK):
        if tK[p] != tL[p]:
            return EquivalenceVerdict(False, p, len(tK), {"type_K": tK[p], "type_L": tL[p]})
    return EquivalenceVerdict(True, None, len(tK))


def support_from_zeta(z: DirichletSeries) -> set[int]:
    """{p ≤ X : some a_{p^k} = 0}; only meaningful over ℚ (inert primes
    would be flagged in a quadratic field)."""
    if z.field is None or z.field.d is not None:
        raise ValueError("support recovery from ζ_{K,m} is only valid for K = ℚ")
    out = set()
    for p in primes_up_to(z.X):
        q = p
        while q <= z.X:
            if z.a(q) == 0:
                out.add(p)
                break
            q *= p
    return out


def splitting_oracle(field: Field, p: int) -> list[int]:
    """Inertia degrees of p from the explicit factorisation."""
    return sorted(f for _, e, f in factor_rational_prime(field, p).primes_above)
