from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congkms.dirichlet import build_zeta
from congkms.ideals import Ideal
from congkms.kms import (IsotropyCharacter, MonomialSpec, SpectrumMultiset, check_beta, classify_type,
                         gibbs_partition, ground_limit, hamiltonian_spectrum, kms_eval_formula,
                         liouville_spectrum, make_orbit_trace, measure_eval, partition_function,
                         quasi_family, random_monomials, trace_from_orbit)
from congkms.operators import TruncatedRep, kms_condition_residual, kms_eval_trace, kms_eval_word
from congkms.toral import FixedPointSet, finite_orbits, toral_action

BETA = 3


def traces_for(S, kappa):
    """The trace at the fixed point 0 and, when available, one on a larger orbit
    with a nontrivial isotropy character."""
    out = [make_orbit_trace(S, kappa)]
    act = toral_action(S, S.class_data.representatives[kappa])
    if not act.trivial:
        for N in (2, 3):
            big = [o for o in finite_orbits(act, N) if o.size > 1]
            if big:
                out.append(make_orbit_trace(S, kappa, big[0].points[0], IsotropyCharacter(1, Fraction(1, 3))))
                break
    return out


def hand_monomials(S):
    f = S.field
    unit = Ideal.unit(f)
    one = f(1)
    U = S.units
    out = [MonomialSpec.identity(S), MonomialSpec(one, f(0), unit, f(1), one)]
    cands = (f(2), f(3), f(5), f(6), f(11)) if f.d is None else (f(2), f(3), f(1, 1), f(5))
    small = [b for b in cands if S.monoid_contains(b)]
    for b in small[:2]:
        out.append(MonomialSpec(b, f(0), unit, f(0), b))
        for i in range(U.torsion_order):
            c = b * U.element(i, 0)
            out.append(MonomialSpec(b, f(0), unit, b, c))
    for n in (2, 3):
        B = Ideal.principal(f(n))
        if S.modulus.coprime_ideal(B):
            out.append(MonomialSpec(one, f(1), B, f(1), one))
    return out


# --------------------------------------------------------------------------
# spectra


def test_spectrum_validation():
    with pytest.raises(ValueError):
        SpectrumMultiset(((Fraction(2), 1),))
    with pytest.raises(ValueError):
        SpectrumMultiset(((1, 1), (Fraction(3), 1), (Fraction(2), 1)))
    with pytest.raises(ValueError):
        SpectrumMultiset(((1, 0),))


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.integers(2, 40), st.integers(1, 6), max_size=6), st.integers(1, 6), st.integers(1, 5))
def test_gibbs_weights_are_exact_and_normalised(levels, m0, beta):
    spec = SpectrumMultiset.from_ratios({1: m0, **levels})
    g = gibbs_partition(spec, beta)
    assert isinstance(g.Z, Fraction)
    assert g.Z == m0 + sum(Fraction(m, r ** beta) for r, m in levels.items())
    assert sum(g.weights) == 1


def test_ground_limit_and_quasi_family():
    spec = SpectrumMultiset.from_ratios({1: 2, 2: 3, 5: 7}, critical=2.0)
    gl = ground_limit(spec, 10, 3)
    assert gl.holds and gl.vector_weight == Fraction(1, 2)
    assert gl.level_weights[0] == 1
    st_ = quasi_family(spec, 3, 4)
    assert st_.Z == gibbs_partition(spec, 4).Z
    with pytest.raises(ValueError):
        quasi_family(spec, 2, 4)


def test_liouville_spectrum_zero_level():
    spec = SpectrumMultiset.from_ratios({1: 2, 2: 3, 4: 1})
    rows = liouville_spectrum(spec, 10)
    zero = [r for r in rows if r[1] == 1][0]
    assert zero[2] == 4 + 9 + 1
    assert [r for r in rows if r[1] == Fraction(1, 2)][0][2] == 2 * 3 + 3 * 1
    assert all(abs(v) <= 10 for v, _, _ in rows)


@pytest.mark.parametrize("key", ["Qi", "Qm5", "Q10", "Q_5inf"])
def test_gibbs_partition_is_scaled_partial_zeta(systems, key):
    S = systems[key]
    X = 500
    for kappa in S.class_data.classes():
        N = S.class_data.min_norm(kappa)
        z = build_zeta(S, "partial", X, kappa)
        for size in (1, 4):
            g = gibbs_partition(hamiltonian_spectrum(S, kappa, X, size), BETA)
            exact = size * Fraction(N) ** BETA * sum(Fraction(int(z.a(n)), n ** (BETA - 1)) for n in z.support())
            assert g.Z == exact


def test_partition_function_errors(systems):
    S = systems["Qi"]
    k = S.class_data.identity()
    with pytest.raises(ValueError):
        partition_function(S, k, FixedPointSet(False, None, ()))
    with pytest.raises(ValueError):
        partition_function(S, k, 0)


def test_classify_type(systems):
    S = systems["Qi"]
    tr = make_orbit_trace(S, S.class_data.identity())
    assert classify_type(tr) == {"trace": "I_1", "state": "I_inf"}
    assert classify_type("haar") == {"trace": "II_1", "state": "II_inf"}
    with pytest.raises(ValueError):
        classify_type("lebesgue")


# --------------------------------------------------------------------------
# orbit traces


@pytest.mark.parametrize("key", ["Qi", "Q10", "Qm5"])
def test_orbit_trace_is_normalised_and_invariant(systems, key):
    S = systems[key]
    f = S.field
    for kappa in S.class_data.classes():
        for tr in traces_for(S, kappa):
            aK = tr.ideal
            assert abs(complex(trace_from_orbit(S, tr, f(0), f(1))) - 1) < 1e-25
            for r in aK.basis():
                for g in S.units.generators():
                    # τ(u_{(g r, 1)}) = τ(u_{(r, 1)})
                    a = complex(trace_from_orbit(S, tr, r, f(1)))
                    b = complex(trace_from_orbit(S, tr, g * r, f(1)))
                    assert abs(a - b) < 1e-20
    with pytest.raises(ValueError):
        trace_from_orbit(S, tr, f(0), f(2))


@pytest.mark.parametrize("key", ["Qi", "Q10", "Q2", "Qm5"])
def test_induced_unitaries_form_a_representation(systems, key):
    S = systems[key]
    kappa = S.class_data.identity()
    w = S.units.torsion_order
    free = S.units.free_generator is not None
    for tr in traces_for(S, kappa):
        rep = TruncatedRep(S, kappa, 10, tr)
        gs = [(i, k) for i in range(w) for k in ((-1, 0, 1) if free else (0,))]
        for g in gs:
            U = rep.pi_u(g)
            assert np.allclose(U.conj().T @ U, np.eye(rep.h0_dim))
            for h in gs:
                gh = ((g[0] + h[0]) % w, g[1] + h[1])
                assert np.allclose(U @ rep.pi_u(h), rep.pi_u(gh))


# --------------------------------------------------------------------------
# evaluation routes


def test_check_beta():
    for bad in (2, 1.5, 0):
        with pytest.raises(ValueError):
            check_beta(bad)
    check_beta(2.0001)


def test_monomial_validation(systems):
    S = systems["Q_5inf"]
    f = S.field
    with pytest.raises(ValueError):
        MonomialSpec(f(2), f(0), Ideal.unit(f), f(0), f(1)).validate(S)
    with pytest.raises(ValueError):
        MonomialSpec(f(1), f(0), Ideal.principal(f(5)), f(0), f(1)).validate(S)
    MonomialSpec(f(6), f(0), Ideal.principal(f(2)), f(1), f(11)).validate(S)


def test_rational_closed_forms(systems):
    S = systems["Q_inf"]
    f = S.field
    k = S.class_data.identity()
    X = 2000
    tr = make_orbit_trace(S, k)
    z = build_zeta(S, "partial", X, k)

    def zeta_le(x, s):
        return sum(z.a(n) * n ** -s for n in range(1, x + 1))

    for n in (2, 3, 6):
        val, err = measure_eval(S, f(0), Ideal.principal(f(n)), BETA, k, X)
        expected = n ** -BETA * zeta_le(X // n, BETA - 1) / zeta_le(X, BETA - 1)
        assert val == pytest.approx(expected, rel=1e-12)
        mon = MonomialSpec(f(1), f(0), Ideal.principal(f(n)), f(0), f(1))
        a = kms_eval_formula(S, mon, BETA, k, tr, X)
        assert abs(a.value - val) < 1e-12
    s2 = MonomialSpec(f(2), f(0), Ideal.unit(f), f(0), f(2))
    assert abs(kms_eval_formula(S, s2, BETA, k, tr, X).value - 1) < 1e-12
    assert abs(kms_eval_trace(S, s2, BETA, k, tr, X).value - 1) < 1e-12
    total, _ = measure_eval(S, f(0), Ideal.unit(f), BETA, k, X)
    assert total == pytest.approx(1.0)


@pytest.mark.parametrize("key", ["Qi", "Qm5", "Q10", "Q_5inf", "Qi_3all", "Q10_inf"])
def test_formula_and_trace_routes_agree_on_hand_monomials(systems, key):
    S = systems[key]
    X = 150
    nonzero = 0
    for kappa in S.class_data.classes():
        for tr in traces_for(S, kappa):
            rep = TruncatedRep(S, kappa, X, tr)
            for m in hand_monomials(S):
                a = kms_eval_formula(S, m, BETA, kappa, tr, X)
                b = kms_eval_trace(S, m, BETA, kappa, tr, X, rep)
                assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound
                assert abs(a.value - b.value) < 1e-12
                nonzero += abs(a.value) > 1e-9
    assert nonzero >= 3


@pytest.mark.parametrize("key", ["Qi", "Qm5", "Q10"])
def test_formula_and_trace_routes_agree_on_random_monomials(systems, key):
    S = systems[key]
    X = 150
    rng = np.random.default_rng(7)
    mons = random_monomials(S, 12, rng)
    for kappa in S.class_data.classes():
        for tr in traces_for(S, kappa):
            rep = TruncatedRep(S, kappa, X, tr)
            for m in mons:
                a = kms_eval_formula(S, m, BETA, kappa, tr, X)
                b = kms_eval_trace(S, m, BETA, kappa, tr, X, rep)
                assert abs(a.value - b.value) < 1e-12


@pytest.mark.parametrize("key", ["Qm5", "Q10", "Q2"])
def test_path_local_transporters_agree_with_global_ones(systems, key):
    S = systems[key]
    X = 80
    rng = np.random.default_rng(3)
    mons = random_monomials(S, 8, rng) + hand_monomials(S)
    for kappa in S.class_data.classes():
        for tr in traces_for(S, kappa):
            loc = TruncatedRep(S, kappa, X, tr)
            glo = TruncatedRep(S, kappa, X, tr, global_transporters=True)
            for m in mons:
                assert abs(loc.weighted_trace(m.word(), BETA) - glo.weighted_trace(m.word(), BETA)) < 1e-12


@pytest.mark.parametrize("key", ["Qi", "Qm5", "Q10", "Q_5inf"])
@pytest.mark.parametrize("beta", [2.5, 3, 5])
def test_kms_residuals_within_tails(systems, key, beta):
    S = systems[key]
    X = 120
    mons = hand_monomials(S)
    for kappa in S.class_data.classes():
        tr = traces_for(S, kappa)[-1]
        rep = TruncatedRep(S, kappa, X, tr)
        for m1, m2 in zip(mons, mons[1:] + mons[:1]):
            res = kms_condition_residual(S, beta, m1, m2, kappa, tr, X, rep)
            assert res["ok"], res


def test_kms_condition_on_rational_isometry(systems):
    S = systems["Q_inf"]
    f = S.field
    k = S.class_data.identity()
    tr = make_orbit_trace(S, k)
    X = 1000
    s2 = MonomialSpec(f(1), f(0), Ideal.unit(f), f(0), f(2))
    s2star = MonomialSpec(f(2), f(0), Ideal.unit(f), f(0), f(1))
    res = kms_condition_residual(S, 3, s2, s2star, k, tr, X)
    # φ(s₂ s₂*) = φ(e_{2ℤ}) = 2^{-3}, and the KMS factor N(2)^{-3} matches φ(s₂* s₂) = 1
    assert res["lhs"] == pytest.approx(1 / 8, abs=1e-3)
    # the residual is pure truncation error and sits inside the stated tail allowance
    assert res["ok"] and res["residual"] <= res["tail_bound"]
    with pytest.raises(TypeError):
        kms_condition_residual(S, 3, s2.word(), s2star, k, tr, X)


def test_adjoint_word_gives_conjugate_value(systems):
    S = systems["Qi"]
    k = S.class_data.identity()
    tr = traces_for(S, k)[-1]
    X = 100
    rep = TruncatedRep(S, k, X, tr)
    for m in hand_monomials(S):
        a = kms_eval_word(S, m.word(), BETA, k, tr, X, rep).value
        b = kms_eval_word(S, m.adjoint_word(), BETA, k, tr, X, rep).value
        assert abs(a - np.conj(b)) < 1e-12


@pytest.mark.parametrize("key", ["Qi", "Q10"])
def test_adjoint_monomial_matches_adjoint_word(systems, key):
    S = systems[key]
    k = S.class_data.identity()
    tr = traces_for(S, k)[-1]
    X = 100
    rep = TruncatedRep(S, k, X, tr)
    for m in random_monomials(S, 10, np.random.default_rng(5)) + hand_monomials(S):
        a = kms_eval_word(S, m.adjoint_word(), BETA, k, tr, X, rep).value
        b = kms_eval_word(S, m.adjoint().word(), BETA, k, tr, X, rep).value
        assert abs(a - b) < 1e-14
        assert m.adjoint().adjoint() == m
