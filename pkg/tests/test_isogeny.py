import random
from fractions import Fraction

import pytest
import sympy

from diagcycle.isogeny import (
    TOTALLY_REAL_POLYS,
    AlgebraElement,
    AlgebraSpec,
    HomElement,
    IsogenyError,
    NumberField,
    SimpleFactor,
    compose,
    dual_basis,
    dual_pairing,
    identity,
    isotypic_projector,
    mterms_check,
    projector_decomposition_check,
    random_element,
    random_hom,
    random_spec,
    standard_basis,
    transpose,
    zero,
)

QP = (0, 1)
SQRT2 = (-2, 0, 1)
CUBIC = (-1, -2, 1, 1)


def spec(*factors):
    return AlgebraSpec(tuple(SimpleFactor(lab, poly, d) for lab, poly, d in factors))


def test_field_validation():
    with pytest.raises(IsogenyError):
        NumberField((1, 0, 1))  # x^2 + 1 is not totally real
    with pytest.raises(IsogenyError):
        NumberField((1, -2, 1))  # (x - 1)^2
    with pytest.raises(IsogenyError):
        NumberField((5,))
    assert NumberField((-4, 0, 2)) == NumberField((-2, 0, 1))


def test_field_arithmetic_against_sympy():
    x = sympy.Symbol("x")
    rng = random.Random(3)
    for poly in TOTALLY_REAL_POLYS:
        f = NumberField(poly)
        mod = sympy.Poly(list(reversed(poly)), x)
        for _ in range(20):
            a = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(f.degree)]
            b = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(f.degree)]
            pa = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(a)], x)
            pb = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(b)], x)
            ref = (pa * pb).rem(mod).all_coeffs()[::-1]
            ref = [Fraction(int(c.p), int(c.q)) for c in ref] + [Fraction(0)] * f.degree
            got = f.elt(a) * f.elt(b)
            assert list(got.coords) == ref[:f.degree]


def test_projector_examples():
    s = spec(("A", QP, 1))
    assert isotypic_projector(s, "A") == identity(s)
    s = spec(("A", QP, 2), ("B", SQRT2, 1))
    e1, e2 = isotypic_projector(s, "A"), isotypic_projector(s, "B")
    assert e1 + e2 == identity(s)
    assert (e1 * e2).is_zero()
    assert isotypic_projector(s, "missing").is_zero()
    assert projector_decomposition_check(spec())
    assert projector_decomposition_check(s)


def test_pairing():
    fac = SimpleFactor("A", SQRT2, 3)
    f = fac.field
    for i, phi in enumerate(standard_basis(fac)):
        for j, psi in enumerate(dual_basis(fac)):
            assert dual_pairing(phi, psi) == (f.one() if i == j else f.zero())
    rng = random.Random(8)
    for _ in range(50):
        d = rng.randint(1, 4)
        fac = SimpleFactor("A", SQRT2, d)
        phi = [f.elt([rng.randint(-3, 3), rng.randint(-3, 3)]) for _ in range(d)]
        if all(a.is_zero() for a in phi):
            continue
        assert any(not dual_pairing(phi, psi).is_zero() for psi in standard_basis(fac))
        m = f.elt([rng.randint(-3, 3), 1])
        psi = standard_basis(fac)[0]
        assert dual_pairing([m * a for a in phi], psi) == m * dual_pairing(phi, psi)
    with pytest.raises(IsogenyError):
        dual_pairing([f.one()], [f.one(), f.one()])


def test_transpose():
    rng = random.Random(4)
    s = spec(("A", CUBIC, 3), ("B", QP, 2))
    assert transpose(s, identity(s)) == identity(s)
    for _ in range(20):
        x, y = random_element(s, rng), random_element(s, rng)
        assert transpose(s, transpose(s, x)) == x
        assert transpose(s, x * y) == transpose(s, y) * transpose(s, x)
    for lab in s.labels:
        p = isotypic_projector(s, lab)
        assert transpose(s, p) == p


def test_mterms_examples():
    rng = random.Random(5)
    j = spec(("A", SQRT2, 2), ("B", QP, 1), ("C", CUBIC, 1))
    j2 = spec(("A", SQRT2, 1), ("B", QP, 3))
    z0 = HomElement.from_blocks(j, j2, {})
    assert z0.is_zero() and mterms_check(j, j2, z0, "A")
    single = spec(("A", SQRT2, 2))
    z = random_hom(single, single, rng)
    assert compose(isotypic_projector(single, "A"), z, identity(single)) == z
    for _ in range(20):
        z = random_hom(j, j2, rng)
        for lab in ("A", "B", "C"):
            assert mterms_check(j, j2, z, lab)


def test_shape_errors():
    s = spec(("A", QP, 2))
    with pytest.raises(IsogenyError):
        AlgebraElement(s, {"A": ((1,),)})
    with pytest.raises(IsogenyError):
        spec(("A", QP, 1), ("A", SQRT2, 1))
    other = spec(("A", SQRT2, 2))
    with pytest.raises(IsogenyError):
        HomElement.from_blocks(s, other, {})
    with pytest.raises(IsogenyError):
        identity(s) * identity(other)


def test_json_round_trip():
    s = spec(("A", CUBIC, 2), ("B", (Fraction(-1, 2), 0, 1), 1))
    assert AlgebraSpec.from_json(s.to_json()) == s
    with pytest.raises(IsogenyError):
        AlgebraSpec.from_json({"factors": [{"label": "A"}]})


def test_random_specs_projectors():
    rng = random.Random(17)
    for _ in range(100):
        s = random_spec(rng)
        assert projector_decomposition_check(s)
        for lab in s.labels:
            p = isotypic_projector(s, lab)
            assert transpose(s, p) == p
        assert zero(s) + identity(s) == identity(s)
