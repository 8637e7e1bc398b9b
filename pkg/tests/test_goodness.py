import itertools
import json
import random

import pytest

from diagcycle.arith import Place, QuaternionAlgebra, QQ, factorize, is_squarefree
from diagcycle.data import Certificate, load_fixture, parse_dataset
from diagcycle.goodness import (
    CONSEQUENCE_GOOD,
    NO,
    UNKNOWN,
    YES,
    check_curve,
    check_triple,
    level_class,
    render_report,
    reproduce_tables,
)

FIXTURE = load_fixture()


def nf(label, level, degree, al, **kw):
    return {"label": label, "level": level, "weight": 2, "hecke_degree": degree, "atkin_lehner": al, **kw}


def toy():
    return parse_dataset({
        "newforms": [
            nf("77.2.a.a", 77, 1, {"7": 1, "11": -1}),
            nf("77.2.a.b", 77, 1, {"7": -1, "11": 1}),
            nf("77.2.a.c", 77, 1, {"7": -1, "11": -1}),
            nf("77.2.a.d", 77, 1, {"7": 1, "11": 1}),
            nf("75.2.a.a", 75, 1, {"3": 1}),
            nf("75.2.a.b", 75, 2, {"3": -1}),
        ],
        "curves": [
            {"label": "77:abc", "level": 77, "genus": 3, "newforms": ["77.2.a.a", "77.2.a.b", "77.2.a.c"]},
            {"label": "77:abd", "level": 77, "genus": 3, "newforms": ["77.2.a.a", "77.2.a.b", "77.2.a.d"]},
            {"label": "75:ab", "level": 75, "genus": 3, "newforms": ["75.2.a.a", "75.2.a.b"]},
        ],
        "certificates": [],
    })


def test_triple_examples():
    ds = toy()
    t = check_triple(ds, ["77.2.a.a"] * 3)
    assert t.conclusion == "Vanishes" and t.witness == Place.finite(11)
    # signs multiply to +1 at both primes
    t = check_triple(ds, ["77.2.a.a", "77.2.a.b", "77.2.a.c"])
    assert t.conclusion == "FormExists" and t.witness is None
    t = check_triple(ds, ["75.2.a.a"] * 3)
    assert t.conclusion == "Unknown" and t.blockers == ("local-type:75.2.a.a@5",)
    with pytest.raises(ValueError):
        check_triple(ds, ["77.2.a.a"] * 2)


def test_curve_examples():
    ds = toy()
    rep = check_curve(ds, "77:abc")
    assert rep.good == NO and len(rep.triples) == 10
    rep = check_curve(ds, "75:ab")
    assert rep.good == UNKNOWN and rep.consequence is None


def test_good_curve_consequence():
    ds = parse_dataset({
        "newforms": [nf("77.2.a.c", 77, 3, {"7": -1, "11": -1})],
        "curves": [{"label": "77:c", "level": 77, "genus": 3, "newforms": ["77.2.a.c"]}],
    })
    rep = check_curve(ds, "77:c")
    assert rep.good == YES and rep.consequence == CONSEQUENCE_GOOD
    assert "good: yes" in render_report(rep)


def test_permutation_invariance():
    ds = toy()
    labels = ["77.2.a.a", "77.2.a.b", "77.2.a.c", "77.2.a.d"]
    for triple in itertools.combinations_with_replacement(labels, 3):
        ref = check_triple(ds, triple)
        for perm in itertools.permutations(triple):
            t = check_triple(ds, perm)
            assert (t.conclusion, t.witness) == (ref.conclusion, ref.witness)


def test_dihedral_certificates():
    # depth-zero supercuspidal at 5 of conductor 25: transfer through Dihedral(6)
    def ds_with(rep):
        return parse_dataset({
            "newforms": [nf("175.2.a.x", 175, 1, {"7": 1}), nf("175.2.a.y", 175, 2, {"7": 1})],
            "curves": [{"label": "175:xy", "level": 175, "genus": 3, "newforms": ["175.2.a.x", "175.2.a.y"]}],
            "certificates": [
                {"id": f"{lab}@5", "scope": {"prime": 5, "newform": lab},
                 "payload": {"type": "dihedral", "group": {"kind": "dihedral", "n": 6}, "rep": rep}}
                for lab in ("175.2.a.x", "175.2.a.y")
            ],
        })

    rep = check_curve(ds_with("V_2"), "175:xy")  # 2 + 2 + 2 = 6: the D-side has the form
    assert rep.good == YES
    assert all(t.witness == Place.finite(5) for t in rep.triples)
    assert check_curve(ds_with("V_1"), "175:xy").good == NO
    assert check_curve(ds_with("V_2").without_certificates(), "175:xy").good == UNKNOWN


def test_mixed_embeddings_keep_a_form():
    ds = parse_dataset({
        "newforms": [nf("175.2.a.y", 175, 2, {"7": 1})],
        "curves": [],
        "certificates": [{"id": "c", "scope": {"prime": 5, "newform": "175.2.a.y"},
                          "payload": {"type": "dihedral", "group": "D6", "reps": ["V_1", "V_2"]}}],
    })
    # V_2^3 has a D-side form but V_1 V_2 V_2 does not, so the sum keeps a GL2 form
    assert check_triple(ds, ["175.2.a.y"] * 3).conclusion == "FormExists"


def test_direct_certificates_resolve_unknowns():
    ds = toy()
    triple = ["75.2.a.a"] * 3
    for hom_gl2, want in ((0, "Vanishes"), (1, "FormExists")):
        cert = Certificate("d", 5, None, tuple(triple), {"type": "direct", "hom_gl2": hom_gl2, "hom_d": 1 - hom_gl2})
        assert check_triple(ds.with_certificates([cert]), triple).conclusion == want


def test_ramified_algebra_swaps_roles():
    ds = toy()
    b = QuaternionAlgebra(QQ, frozenset({Place.finite(7), Place.finite(11)}))
    assert check_triple(ds, ["77.2.a.d"] * 3, b).conclusion == "Vanishes"
    assert check_triple(ds, ["77.2.a.c"] * 3, b).conclusion == "FormExists"


def test_level_class():
    assert level_class(217) == "squarefree"
    assert [level_class(n) for n in (99, 169, 475, 1175, 855)] == ["p2"] * 5
    assert [level_class(n) for n in (243, 459, 1215, 1539, 225)] == ["higher"] * 5


def squarefree_oracle(al_by_form, forms):
    """Good iff every multiset of three forms has a prime with sign product -1."""
    primes = set().union(*(al_by_form[f] for f in forms))
    for t in itertools.combinations_with_replacement(forms, 3):
        if not any(al_by_form[t[0]][p] * al_by_form[t[1]][p] * al_by_form[t[2]][p] == -1 for p in primes):
            return NO
    return YES


def test_squarefree_oracle_on_fixture():
    curves = [c for c in FIXTURE.curves.values() if is_squarefree(c.level)]
    assert len(curves) >= 20
    for c in curves:
        al = {f: FIXTURE.orbit(f).atkin_lehner for f in c.newforms}
        assert check_curve(FIXTURE, c.label).good == squarefree_oracle(al, c.newforms), c.label


def test_squarefree_oracle_random():
    rng = random.Random(7)
    for _ in range(200):
        level = rng.choice([35, 77, 105, 143, 231, 1155])
        primes = list(factorize(level))
        degrees = rng.choice([[1, 1, 1], [1, 2], [3]])
        forms = []
        records = []
        for i, d in enumerate(degrees):
            lab = f"{level}.2.a.{'abc'[i]}"
            al = {str(p): rng.choice((1, -1)) for p in primes}
            records.append(nf(lab, level, d, al))
            forms.append(lab)
        ds = parse_dataset({"newforms": records,
                            "curves": [{"label": "X", "level": level, "genus": 3, "newforms": forms}]})
        al = {f: ds.orbit(f).atkin_lehner for f in forms}
        assert check_curve(ds, "X").good == squarefree_oracle(al, forms)


def test_certificate_removal_never_flips():
    bare = FIXTURE.without_certificates()
    for lab in FIXTURE.curves:
        full, stripped = check_curve(FIXTURE, lab).good, check_curve(bare, lab).good
        assert stripped in (full, UNKNOWN), lab
        for t_full, t_bare in zip(check_curve(FIXTURE, lab).triples, check_curve(bare, lab).triples):
            assert t_bare.conclusion in (t_full.conclusion, "Unknown")


def test_monotonic_under_direct_certificates():
    rng = random.Random(3)
    for lab in sorted(FIXTURE.curves):
        for t in check_curve(FIXTURE, lab).triples:
            for p in sorted(factorize(FIXTURE.curve(lab).level)):
                g = rng.randint(0, 1)
                cert = Certificate(f"x@{p}", p, None, t.labels, {"type": "direct", "hom_gl2": g, "hom_d": 1 - g})
                after = check_triple(FIXTURE.with_certificates([cert]), t.labels)
                if t.conclusion != "Unknown":
                    assert after.conclusion == t.conclusion, (lab, t.labels, p)


def test_higher_levels_never_yes():
    for lab, c in FIXTURE.curves.items():
        if c.level in (243, 1215, 1539):
            assert check_curve(FIXTURE, lab).good in (NO, UNKNOWN)


def test_determinism_and_parallel():
    a = json.dumps(reproduce_tables(FIXTURE).to_json(), sort_keys=True)
    b = json.dumps(reproduce_tables(load_fixture()).to_json(), sort_keys=True)
    assert a == b
    for lab in ("217.A", "475.E"):
        assert check_curve(FIXTURE, lab, workers=2) == check_curve(FIXTURE, lab)


def test_reproduce_tables_diff_mechanics():
    ds = toy()
    s = reproduce_tables(ds, expected={"squarefree": ["77:abc"], "p2": [], "higher": []})
    sq = s.classes[0]
    assert sq.missing == ("77:abc",) and not s.ok
    p2 = s.classes[1]
    assert p2.unresolved == ("75:ab",)
