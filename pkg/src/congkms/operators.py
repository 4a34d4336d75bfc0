"""The induced representation on ℓ²(⊔_𝔞 R/𝔞) ⊗ H_0 truncated at norm X, and
KMS values as weighted traces of operator words.

This route never uses the measure formula: it applies U^d, S_b, S_b*, E_𝔟^y
to basis vectors δ_(𝔞,x) ⊗ H_0 and reads off diagonal matrix elements.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from . import latticevec as lv
from .congruence import SystemDescriptor
from .field import Element
from .ideals import Ideal
from .kms import (KMSValue, MonomialSpec, OrbitTrace, check_beta, class_ideals, class_transporter,
                  state_error, unit_exponents)
from .toral import apply_mod1


class TruncatedRep:
    """ϑ_κ on basis vectors (𝔞, x), N(𝔞) ≤ X, with H_0 = ℓ²(O) induced from χ."""

    def __init__(self, sys: SystemDescriptor, kappa, X: int, trace: OrbitTrace,
                 global_transporters: bool = False):
        self.sys = sys
        self.global_transporters = global_transporters
        self.kappa = tuple(kappa)
        self.X = X
        self.trace = trace
        self.ideals = class_ideals(sys, kappa, X)
        self.rep = trace.ideal
        self.field = sys.field
        orb = trace.orbit
        self.points = list(orb.points)
        self.index = {p: j for j, p in enumerate(self.points)}
        D = 1
        for p in self.points:
            for c in p:
                D = D * c.denominator // np.gcd(D, c.denominator)
        self.D = int(D)
        self.P = np.array([[int(c * D) for c in p] for p in self.points], dtype=np.int64)
        self._unit_cache: dict = {}
        self._exp_cache: dict = {}

    @property
    def h0_dim(self) -> int:
        return len(self.points)

    def basis_size(self) -> int:
        return sum(I.inorm() for I in self.ideals)

    # ---- π_0 -----------------------------------------------------------------

    def pi_f(self, rc: np.ndarray) -> np.ndarray:
        """Diagonals of π_0(u_{(r,1)}) for coordinate columns rc (dim, n): shape (n, |O|)."""
        idx = (self.P @ (rc % self.D)) % self.D
        return np.exp(2j * np.pi * idx.T / self.D)

    def pi_u(self, g: tuple[int, int]) -> np.ndarray:
        """π_0(u_{(0,g)}) on ℓ²(O): g·γ_j = γ_j' with the cocycle χ(g_j'^{-1} g g_j)."""
        if g in self._unit_cache:
            return self._unit_cache[g]
        i, k = g
        act = self.trace.action
        # stored matrices implement the inverse of the covariant action
        cov = act.element_matrix(-i, -k)
        n = self.h0_dim
        M = np.zeros((n, n), dtype=complex)
        els = self.trace.orbit.elements
        for j, p in enumerate(self.points):
            jp = self.index[apply_mod1(cov, p)]
            h = (i + els[jp][0] - els[j][0], k + els[jp][1] - els[j][1])
            if not self.trace.contains(h):
                raise AssertionError("cocycle left the isotropy group")
            M[jp, j] = np.exp(2j * np.pi * float(self.trace.chi_phase(h)))
        self._unit_cache[g] = M
        return M

    def t(self, ideal: Ideal) -> Element:
        return class_transporter(self.sys, ideal, self.rep)

    def _t_local(self, tmap: dict, C: Ideal, C2: Ideal, lam: Element) -> Element:
        """Transporter of C2 = lam·C, extended along the current path.

        A diagonal matrix element at (A, x) is unchanged when the transporters
        of blocks other than A are multiplied by units of R*_(m,Γ) (a
        block-diagonal unitary fixing the A-block), so a family built along
        the path of one basis vector is as good as a global one.
        """
        if C2 not in tmap:
            tmap[C2] = self.t(C2) if self.global_transporters else tmap[C] / lam
            if not self.global_transporters:
                return tmap[C2], True
        return tmap[C2], False

    def _exps(self, g: Element) -> tuple[int, int]:
        gi = self._exp_cache.get(g)
        if gi is None:
            gi = unit_exponents(self.sys, g)
            if gi is None:
                raise AssertionError("transporter quotient is not in R*_(m,Γ)")
            self._exp_cache[g] = gi
        return gi

    # ---- operators on a batch of basis vectors sharing one ideal ---------------

    def apply(self, op, C: Ideal | None, U, V, alive, M, tmap: dict):
        kind, arg = op
        f = self.field
        if C is None:
            return C, U, V, alive, M
        if kind == "U":
            du, dv = lv.int_coords(arg)
            wu, wv = U + du, V + dv
            zu, zv = lv.reduce(C, wu, wv)
            rc = lv.transfer_matrix(tmap[C], C, self.rep) @ lv.coords(C, wu - zu, wv - zv)
            M = self.pi_f(rc)[:, :, None] * M
            return C, zu, zv, alive, M
        if kind == "S":
            C2 = C.scale(arg)
            wu, wv = lv.mul(f, arg, U, V)
            zu, zv = lv.reduce(C2, wu, wv)
            t2, fresh = self._t_local(tmap, C, C2, arg)
            rc = lv.transfer_matrix(t2, C2, self.rep) @ lv.coords(C2, wu - zu, wv - zv)
            g = (0, 0) if fresh else self._exps(arg * t2 / tmap[C])
            M = self.pi_f(rc)[:, :, None] * (self.pi_u(g) @ M)
            return C2, zu, zv, alive, M
        if kind == "Sstar":
            C2 = C.divide_integral(arg)
            if C2 is None:
                return None, U, V, np.zeros_like(alive), M
            mask, qu, qv = lv.divisible_by(f, arg, U, V)
            xu, xv = lv.reduce(C2, qu, qv)
            # S_b δ(C2, x') = δ(C, z) ⊗ π_0(u_h), h = (t_C(b x' − z), b t_{C2}^{-1} t_C)
            bu, bv = lv.mul(f, arg, xu, xv)
            t2, fresh = self._t_local(tmap, C, C2, arg.inverse())
            rc = lv.transfer_matrix(tmap[C], C, self.rep) @ lv.coords(C, bu - U, bv - V)
            g = (0, 0) if fresh else self._exps(arg * tmap[C] / t2)
            Fm = self.pi_f(rc)[:, :, None] * self.pi_u(g)[None, :, :]
            M = np.conj(np.transpose(Fm, (0, 2, 1))) @ M
            return C2, xu, xv, alive & mask, M
        if kind == "E":
            B, y = arg
            if not B.divides(C):
                return None, U, V, np.zeros_like(alive), M
            yu, yv = lv.int_coords(y)
            return C, U, V, alive & lv.member(B, U - yu, V - yv), M
        raise ValueError(f"unknown operator {kind!r}")

    def diagonal(self, word: list[tuple], A: Ideal) -> np.ndarray:
        """Tr_{H_0}⟨W δ_(A,x), δ_(A,x)⟩ for every x ∈ R/A."""
        U0, V0 = lv.residues(A)
        n = len(U0)
        M = np.broadcast_to(np.eye(self.h0_dim, dtype=complex), (n, self.h0_dim, self.h0_dim)).copy()
        C, U, V, alive = A, U0.copy(), V0.copy(), np.ones(n, dtype=bool)
        tmap = {A: self.t(A)}
        for op in reversed(word):
            C, U, V, alive, M = self.apply(op, C, U, V, alive, M, tmap)
            if C is None or not alive.any():
                return np.zeros(n, dtype=complex)
        if C != A:
            return np.zeros(n, dtype=complex)
        diag = alive & (U == U0) & (V == V0)
        return np.where(diag, np.trace(M, axis1=1, axis2=2), 0)

    def moves_blocks(self, word: list[tuple]) -> bool:
        """True when W maps each block H_𝔞 into H_{λ𝔞} with (λ) ≠ R, so that
        every diagonal matrix element vanishes."""
        lam = self.field(1)
        for kind, arg in word:
            if kind == "S":
                lam = lam * arg
            elif kind == "Sstar":
                lam = lam / arg
        return not (lam.is_integral() and abs(lam.norm()) == 1)

    def weighted_trace(self, word: list[tuple], beta) -> complex:
        """(Tr ⊗ tr)(W e^{-βH}) / Tr(e^{-βH}) over the truncated basis."""
        num = 0j
        Z = 0.0
        skip = self.moves_blocks(word)
        for A in self.ideals:
            N = A.inorm()
            w = N ** (-float(beta))
            Z += N * w
            if not skip:
                num += w * self.diagonal(word, A).sum() / self.h0_dim
        return complex(num / Z)


def kms_eval_trace(sys: SystemDescriptor, mon: MonomialSpec, beta, kappa, trace: OrbitTrace, X: int,
                   rep: TruncatedRep | None = None) -> KMSValue:
    check_beta(beta)
    mon.validate(sys)
    rep = rep or TruncatedRep(sys, kappa, X, trace)
    val = rep.weighted_trace(mon.word(), beta)
    err = state_error(sys, kappa, beta, X, rep.basis_size())
    return KMSValue(val, err, X, float(beta), str(mon))


def kms_eval_word(sys: SystemDescriptor, word: list[tuple], beta, kappa, trace: OrbitTrace, X: int,
                  rep: TruncatedRep | None = None) -> KMSValue:
    """State value of an arbitrary product of generators (leftmost first)."""
    check_beta(beta)
    rep = rep or TruncatedRep(sys, kappa, X, trace)
    val = rep.weighted_trace(word, beta)
    return KMSValue(val, state_error(sys, kappa, beta, X, rep.basis_size()), X, float(beta))


def kms_condition_residual(sys: SystemDescriptor, beta, mon1: MonomialSpec, mon2: MonomialSpec,
                           kappa, trace: OrbitTrace, X: int, rep: TruncatedRep | None = None) -> dict:
    """|φ(m1 m2) − (N(c1)/N(b1))^{-β} φ(m2 m1)| with the combined tail bound."""
    if not isinstance(mon1, MonomialSpec) or not isinstance(mon2, MonomialSpec):
        raise TypeError("the KMS residual is defined for σ-eigen monomials")
    check_beta(beta)
    mon1.validate(sys)
    mon2.validate(sys)
    rep = rep or TruncatedRep(sys, kappa, X, trace)
    lhs = kms_eval_word(sys, mon1.word() + mon2.word(), beta, kappa, trace, X, rep)
    rhs = kms_eval_word(sys, mon2.word() + mon1.word(), beta, kappa, trace, X, rep)
    factor = float(mon1.eigen_ratio) ** (-float(beta))
    residual = abs(lhs.value - factor * rhs.value)
    bound = lhs.tail_bound + factor * rhs.tail_bound
    return {"residual": residual, "tail_bound": bound, "ok": residual <= bound,
            "lhs": lhs.value, "rhs": rhs.value, "factor": factor, "beta": float(beta), "X": X,
            "mon1": str(mon1), "mon2": str(mon2)}
