import random

import pytest

from diagcycle.arith import QQ, FieldDesc, Place, hasse_invariant, is_almost_definite
from diagcycle.localglobal import (
    FORM_EXISTS,
    INCONCLUSIVE,
    VANISHES,
    LocalComponent,
    LocalDataError,
    Resolution,
    RootNumberError,
    TripleLocalVerdict,
    archimedean_epsilon,
    global_root_number,
    local_triple_verdict,
    supporting_quaternion,
)
from diagcycle.repcore import GroupSpec

P = Place.finite
S = LocalComponent.special
D6 = GroupSpec.dihedral(6)
PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


def test_all_special_sign_product():
    v = P(7)
    assert local_triple_verdict(v, [S(-1)] * 3, True).outcome == VANISHES
    assert local_triple_verdict(v, [S(1)] * 3, True).outcome == FORM_EXISTS
    r = local_triple_verdict(v, [S(1), S(-1), S(-1)], True)
    assert (r.outcome, r.epsilon, r.reason) == (FORM_EXISTS, 1, "al-sign-product")
    # on the ramified side the roles swap
    assert local_triple_verdict(v, [S(-1)] * 3, False).outcome == FORM_EXISTS
    assert local_triple_verdict(v, [S(1)] * 3, False).outcome == VANISHES


def test_non_discrete_components():
    v = P(5)
    for comp in (LocalComponent.unramified(), LocalComponent.ramified_ps()):
        r = local_triple_verdict(v, [comp, S(-1), S(-1)], True)
        assert (r.outcome, r.epsilon, r.reason) == (FORM_EXISTS, 1, "jl-zero")
        with pytest.raises(LocalDataError):
            local_triple_verdict(v, [comp, S(-1), S(-1)], False)


def test_dihedral_triples():
    v = P(5)
    v1 = LocalComponent.dihedral(D6, "V_1")
    v2 = LocalComponent.dihedral(D6, "V_2")
    # V_2^3 on D_6 has an invariant (2+2+2 = 6), V_1^3 has none
    r = local_triple_verdict(v, [v2] * 3, True)
    assert (r.outcome, r.epsilon) == (VANISHES, -1)
    r = local_triple_verdict(v, [v1] * 3, True)
    assert (r.outcome, r.epsilon) == (FORM_EXISTS, 1)
    assert local_triple_verdict(v, [v1] * 3, False).outcome == VANISHES


def test_twisted_special_and_opaque_need_resolution():
    v = P(3)
    comps = [S(None), S(1), S(1)]
    r = local_triple_verdict(v, comps, True)
    assert r.outcome == INCONCLUSIVE and r.missing
    r = local_triple_verdict(v, comps, True, Resolution("c1", 0))
    assert (r.outcome, r.reason) == (VANISHES, "certificate:c1")
    r = local_triple_verdict(v, [LocalComponent.opaque("x")] * 3, True, Resolution("c2", 1))
    assert r.outcome == FORM_EXISTS
    r = local_triple_verdict(v, [LocalComponent.opaque("x")] * 3, True)
    assert r.missing == ("x",)
    with pytest.raises(LocalDataError):
        Resolution("bad", 2)


def test_central_character():
    odd = LocalComponent("ramified_ps", central_character_trivial=False)
    r = local_triple_verdict(P(3), [odd, S(1), S(1)], True)
    assert (r.outcome, r.reason) == (VANISHES, "central-character")


def test_component_validation_and_json():
    with pytest.raises(LocalDataError):
        LocalComponent("weird")
    with pytest.raises(LocalDataError):
        S(2)
    with pytest.raises(LocalDataError):
        LocalComponent("sc_dihedral", group=D6)
    with pytest.raises(KeyError):
        LocalComponent.dihedral(D6, "V_5")
    for c in (S(1), S(None), LocalComponent.dihedral(D6, "V_2", "cert"), LocalComponent.ramified_ps()):
        assert LocalComponent.from_json(c.to_json()) == c
    with pytest.raises(LocalDataError):
        local_triple_verdict(P(3), [S(1)] * 2, True)


def test_root_number_over_q():
    verdicts = [TripleLocalVerdict(P(p), FORM_EXISTS, None, 1) for p in (2, 3, 7)]
    res = global_root_number(QQ, verdicts)
    assert archimedean_epsilon() == -1
    assert res.global_sign == -1 and res.l_value_forced_zero and res.citation
    res = global_root_number(QQ, [TripleLocalVerdict(P(7), VANISHES, None, -1)])
    assert res.global_sign == 1 and not res.l_value_forced_zero and res.citation is None
    with pytest.raises(RootNumberError):
        global_root_number(QQ, [TripleLocalVerdict(P(7), INCONCLUSIVE)])
    with pytest.raises(RootNumberError):
        global_root_number(QQ, [TripleLocalVerdict(Place.real(0), FORM_EXISTS, None, 1)])


def test_root_number_and_supporting_quaternion_random():
    rng = random.Random(2024)
    for _ in range(1000):
        deg = rng.randint(1, 4)
        base = QQ if deg == 1 else FieldDesc(f"F{deg}", deg)
        labels = rng.sample(PRIMES, rng.randint(0, 6))
        places = [P(p) if deg == 1 else P(f"w{p}") for p in labels]
        signs = {v: rng.choice((1, -1)) for v in places}
        res = global_root_number(base, [TripleLocalVerdict(v, FORM_EXISTS, None, s) for v, s in signs.items()])
        prod = 1
        for s in signs.values():
            prod *= s
        assert res.global_sign == (-1) ** deg * prod
        assert res.l_value_forced_zero == (res.global_sign == -1)

        candidates = deg + sum(1 for s in signs.values() if s == -1)
        b = supporting_quaternion(base, signs)
        if candidates % 2:
            assert b is None
            continue
        assert b is not None
        assert len(b.ramified) == candidates
        every = set(signs) | set(base.infinite_places())
        for v in every:
            eps_pi = signs.get(v, archimedean_epsilon() if v.is_real else 1)
            assert eps_pi * hasse_invariant(b, v) == 1
        # unique: any algebra with those invariants has the same ramification
        assert b == supporting_quaternion(base, {v: s for v, s in signs.items()})


def test_supporting_quaternion_examples():
    assert supporting_quaternion(QQ, {}) is None
    b = supporting_quaternion(QQ, {P(7): -1})
    assert b.ramified == {P(7), Place.real(0)}
    assert not is_almost_definite(b)
    with pytest.raises(LocalDataError):
        supporting_quaternion(QQ, {P(7): 0})
