from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from diagcycle.cyclotomic import CycloElt
from diagcycle.repcore import (
    GroupSpec,
    RepTableError,
    all_triples,
    character_table,
    dual_label,
    oracle_multiplicity,
    rep_matrix,
    tensor_decompose,
    trilinear_multiplicity,
)

D = GroupSpec.dihedral
C = GroupSpec.cyclic


def groups(max_n=20):
    for n in range(1, max_n + 1):
        yield C(n)
        if n >= 3:
            yield D(n)


def _inner(table, r1, r2):
    g = table.group
    total = CycloElt.zero(g.n)
    for cls, x, y in zip(table.classes, r1, r2):
        total = total + x * y.conjugate() * cls.size
    return (total / g.order).rational_part()


def test_small_tables():
    t = character_table(C(1))
    assert len(t.classes) == 1 and [lab.name for lab in t.labels] == ["chi_0"]
    t = character_table(D(3))
    assert [c.size for c in t.classes] == [1, 2, 3]
    assert [lab.dim for lab in t.labels] == [1, 1, 2]
    t = character_table(D(4))
    assert len(t.classes) == 5
    assert sorted(lab.dim for lab in t.labels) == [1, 1, 1, 1, 2]


def test_label_counts():
    for n in range(3, 21):
        dims = [lab.dim for lab in character_table(D(n)).labels]
        ones = 4 if n % 2 == 0 else 2
        assert dims.count(1) == ones
        assert dims.count(2) == ((n - 1) // 2 if n % 2 else (n - 2) // 2)
        assert len(character_table(C(n)).labels) == n


@pytest.mark.parametrize("g", list(groups()), ids=str)
def test_orthogonality(g):
    t = character_table(g)
    rows = list(t.rows.values())
    assert sum(c.size for c in t.classes) == g.order
    assert sum(lab.dim ** 2 for lab in t.labels) == g.order
    for i, r1 in enumerate(rows):
        for j, r2 in enumerate(rows):
            assert _inner(t, r1, r2) == (1 if i == j else 0)
    # column relation: sum_chi chi(c) conj(chi(c')) = delta |G| / |c|
    for a, ca in enumerate(t.classes):
        for b in range(len(t.classes)):
            s = CycloElt.zero(g.n)
            for r in rows:
                s = s + r[a] * r[b].conjugate()
            expect = Fraction(g.order, ca.size) if a == b else 0
            assert s.rational_part() == expect


def test_multiplicity_examples():
    assert trilinear_multiplicity(D(3), "triv", "triv", "triv") == 1
    assert trilinear_multiplicity(D(3), "V_1", "V_1", "V_1") == 1
    assert trilinear_multiplicity(D(5), "triv", "V_1", "V_2") == 0


def test_tensor_examples():
    assert tensor_decompose(D(3), "V_1", "V_1") == {"triv": 1, "sgn": 1, "V_1": 1}
    assert tensor_decompose(C(4), "chi_1", "chi_3") == {"chi_0": 1}
    for g in (C(6), D(5), D(8)):
        for lab in character_table(g).labels:
            assert tensor_decompose(g, lab.name, "triv" if g.kind == "dihedral" else "chi_0") == {lab.name: 1}


def test_tensor_dimensions():
    for g in (D(6), D(7), C(9)):
        t = character_table(g)
        dims = {lab.name: lab.dim for lab in t.labels}
        for a, b in combinations_with_replacement(dims, 2):
            dec = tensor_decompose(g, a, b)
            assert sum(m * dims[k] for k, m in dec.items()) == dims[a] * dims[b]


def test_two_dimensional_rule():
    # V_a (x) V_b (x) V_c has an invariant iff +-a +-b +-c = 0 mod n
    for n in range(3, 13):
        js = range(1, (n + 1) // 2)
        for a, b, c in combinations_with_replacement(js, 3):
            hit = any((sa * a + sb * b + sc * c) % n == 0
                      for sa in (1, -1) for sb in (1, -1) for sc in (1, -1))
            assert trilinear_multiplicity(D(n), f"V_{a}", f"V_{b}", f"V_{c}") == int(hit)


def test_symmetry_and_duals():
    for g in (D(6), D(9), C(5), C(8)):
        names = [lab.name for lab in character_table(g).labels]
        triv = names[0]
        for a in names:
            for b in names:
                expect = 1 if b == dual_label(g, a) else 0
                assert trilinear_multiplicity(g, a, b, triv) == expect
                for c in names[:3]:
                    m = trilinear_multiplicity(g, a, b, c)
                    assert m == trilinear_multiplicity(g, b, c, a) == trilinear_multiplicity(g, c, b, a)


def test_oracle_matches_small():
    assert oracle_multiplicity(D(3), "V_1", "V_1", "V_1", check_idempotent=True) == 1
    assert oracle_multiplicity(D(3), "triv", "triv", "triv") == 1


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_oracle_agreement_cyclic_and_dihedral(n):
    for g in (C(n), D(n)):
        for a, b, c in all_triples(g):
            assert oracle_multiplicity(g, a, b, c) == trilinear_multiplicity(g, a, b, c)


def test_rep_matrices_are_homomorphisms():
    g = D(5)
    elems = g.elements()

    def mul(x, y):
        # (r^a s^e)(r^b s^f) = r^(a + (-1)^e b) s^(e+f)
        return ((x[0] + (-1) ** x[1] * y[0]) % g.n, (x[1] + y[1]) % 2)

    for lab in ("V_1", "V_2", "sgn"):
        for x in elems:
            for y in elems:
                mx, my = rep_matrix(g, lab, x), rep_matrix(g, lab, y)
                prod = [[sum((mx[i][k] * my[k][j] for k in range(len(my))), CycloElt.zero(5))
                         for j in range(len(my))] for i in range(len(mx))]
                assert prod == rep_matrix(g, lab, mul(x, y))


def test_bad_inputs():
    with pytest.raises(KeyError):
        trilinear_multiplicity(D(3), "V_2", "triv", "triv")
    with pytest.raises(ValueError):
        GroupSpec("dihedral", 2)
    with pytest.raises(ValueError):
        GroupSpec("symmetric", 4)
    assert GroupSpec.parse("Dihedral(6)") == D(6)
    assert GroupSpec.parse("C5") == C(5)
    assert issubclass(RepTableError, RuntimeError)
