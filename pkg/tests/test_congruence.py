from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from congkms.congruence import monoid_contains, reduce_mod_m, transporter
from congkms.field import Field
from congkms.ideals import Ideal, enumerate_ideals
from congkms.kms import class_ideals
from conftest import make_system
from oracles import unit_group_mod


@pytest.mark.parametrize("d,N", [(None, 5), (None, 12), (-1, 3), (-1, 5), (-5, 3), (10, 3), (2, 4), (-3, 7)])
def test_residue_group_order(d, N):
    S = make_system(d, N)
    assert S.residue_group.order == unit_group_mod(d, N)


def test_residue_group_with_signs():
    S = make_system(None, 5, (0,))
    G = S.residue_group
    assert G.order == 8
    assert reduce_mod_m(Field(None)(-4), S.modulus).signs == (-1,)
    with pytest.raises(ValueError):
        G.reduce(Field(None)(10))


def test_monoid_membership_over_q():
    S = make_system(None, 5, (0,))
    # Γ = {1}: positive integers ≡ 1 mod 5
    got = [n for n in range(-30, 31) if n and monoid_contains(Field(None)(n), S)]
    assert got == [n for n in range(1, 31) if n % 5 == 1]
    T = make_system(None, 1, (0,))
    assert monoid_contains(Field(None)(7), T) and not monoid_contains(Field(None)(-7), T)


def test_gamma_all_gives_full_monoid():
    S = make_system(-1, 3, gamma="all")
    f = S.field
    assert S.gamma.order == 8
    assert monoid_contains(f(1, 1), S)
    assert not monoid_contains(f(3), S) and not monoid_contains(f(3, 3), S)


@pytest.mark.parametrize("key,tor,free", [
    ("Q_inf", 1, False), ("Q_5inf", 1, False), ("Q_5", 1, False), ("Qi", 4, False),
    ("Qi_3all", 4, False), ("Qm5", 2, False), ("Q10", 2, True), ("Q10_inf", 1, True), ("Q2", 2, True)])
def test_restricted_units(systems, key, tor, free):
    U = systems[key].units
    assert U.torsion_order == tor
    assert (U.free_generator is not None) == free
    for g in U.generators():
        assert systems[key].monoid_contains(g)
        assert abs(g.norm()) == 1


def test_restricted_units_exponents(systems):
    U = systems["Q10"].units
    for i in range(U.torsion_order):
        for k in (-2, -1, 0, 1, 3):
            assert U.exponents(U.element(i, k)) == (i, k)


@pytest.mark.parametrize("key,h", [
    ("Q_inf", 1), ("Q_5inf", 4), ("Q_5", 2), ("Qi", 1), ("Qi_3all", 1), ("Qm5", 2), ("Q10", 2),
    ("Q10_inf", 2), ("Q2", 1), ("Q3", 1)])
def test_generalized_class_number(systems, key, h):
    cd = systems[key].class_data
    assert cd.order == h == cd.closed_form_order


@pytest.mark.parametrize("N", [3, 4, 7, 8, 11, 13])
def test_rational_ray_classes(N):
    # ideals (n), n > 0 coprime to N, modulo n ≡ 1 mod N: |(ℤ/N)*|
    S = make_system(None, N, (0,))
    cd = S.class_data
    assert cd.order == unit_group_mod(None, N)
    f = S.field
    for a in range(1, 60):
        for b in range(1, 60):
            if a % N == b % N and a % N and gcd(a, N) == 1:
                assert cd.class_of(Ideal.principal(f(a))) == cd.class_of(Ideal.principal(f(b)))


@pytest.mark.parametrize("key", ["Qm5", "Q10", "Q_5inf", "Qi_3all", "Q10_inf"])
def test_transporters_carry_ideals_to_representatives(systems, key):
    S = systems[key]
    cd = S.class_data
    for kappa in cd.classes():
        rep = cd.representatives[kappa]
        for A in class_ideals(S, kappa, 80):
            t = transporter(A, rep, S)
            assert A.scale(t) == rep
            assert S.residue_group.reduce_fraction(t) in S.gamma.elements


def test_transporter_rejects_other_class(systems):
    S = systems["Qm5"]
    f = S.field
    P2 = [I for I in enumerate_ideals(f, 2)[2]][0]
    with pytest.raises(ValueError):
        transporter(P2, Ideal.unit(f), S)


@settings(max_examples=40, deadline=None)
@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20), st.integers(-20, 20))
def test_class_map_is_a_homomorphism(a, b, c, d):
    S = make_system(-5, 3)
    f = S.field
    x, y = f(a, b), f(c, d)
    if x.is_zero() or y.is_zero() or not (S.modulus.coprime_element(x) and S.modulus.coprime_element(y)):
        return
    cd = S.class_data
    grp = cd.group
    I, J = Ideal.principal(x), Ideal.principal(y)
    assert cd.class_of(I * J) == grp.add(cd.class_of(I), cd.class_of(J))
