"""Semisimple endomorphism algebras up to isogeny.

A Jacobian J isogenous to prod_A A^{d_A} has End(J) (x) Q = prod_A Mat_{d_A}(M_A),
where M_A = End(A) (x) Q is a totally real number field.  Elements are stored
as one square block per simple factor.  Homomorphisms J -> J' are stored as one
rectangular block per factor the two Jacobians share.

Field elements are residues modulo the minimal polynomial with exact rational
coordinates.  A and its dual are identified, so the Rosati-type transpose is
the blockwise matrix transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence


class IsogenyError(ValueError):
    pass


def _strip(coeffs: list[Fraction]) -> list[Fraction]:
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


class NumberField:
    """Q[x] / (f) for a monic squarefree f whose roots are all real."""

    __slots__ = ("poly", "degree", "_reduction")

    def __init__(self, min_poly: Sequence, validate: bool = True):
        coeffs = _strip([Fraction(c) for c in min_poly])
        if len(coeffs) < 2:
            raise IsogenyError(f"minimal polynomial must have positive degree, got {list(min_poly)}")
        lead = coeffs[-1]
        self.poly = tuple(c / lead for c in coeffs)
        self.degree = len(self.poly) - 1
        if validate:
            self._validate()
        # x^(d+k) in the power basis, for products of degree up to 2d-2
        d = self.degree
        rows = []
        cur = [-c for c in self.poly[:-1]]
        for _ in range(max(d - 1, 0)):
            rows.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            if top:
                cur = [a - top * c for a, c in zip(cur, self.poly[:-1])]
        self._reduction = tuple(rows)

    def _validate(self):
        import sympy

        x = sympy.Symbol("x")
        p = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self.poly)], x)
        if not p.is_sqf:
            raise IsogenyError(f"minimal polynomial {p.as_expr()} is not squarefree")
        if p.count_roots() != self.degree:
            raise IsogenyError(f"minimal polynomial {p.as_expr()} has non-real roots")

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"NumberField({[str(c) for c in self.poly]})"

    def elt(self, coords) -> NFElt:
        coords = [Fraction(c) for c in coords]
        if len(coords) > self.degree:
            raise IsogenyError(f"too many coordinates for a degree-{self.degree} field")
        return NFElt(self, tuple(coords + [Fraction(0)] * (self.degree - len(coords))))

    def scalar(self, q) -> NFElt:
        return self.elt([q])

    def zero(self) -> NFElt:
        return self.scalar(0)

    def one(self) -> NFElt:
        return self.scalar(1)

    def gen(self) -> NFElt:
        if self.degree == 1:
            return self.scalar(-self.poly[0])
        return self.elt([0, 1])


class NFElt:
    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: tuple[Fraction, ...]):
        self.field = field
        self.coords = coords

    def _check(self, other) -> NFElt:
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        if not isinstance(other, NFElt):
            raise TypeError(f"cannot combine a number-field element with {type(other).__name__}")
        if other.field != self.field:
            raise IsogenyError("number-field elements over different fields")
        return other

    def __add__(self, other) -> NFElt:
        other = self._check(other)
        return NFElt(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self) -> NFElt:
        return NFElt(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other) -> NFElt:
        return self + (-self._check(other))

    def __mul__(self, other) -> NFElt:
        other = self._check(other)
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        out = prod[:d]
        for k, row in enumerate(self.field._reduction):
            c = prod[d + k]
            if c:
                out = [o + c * r for o, r in zip(out, row)]
        return NFElt(self.field, tuple(out))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coords[0] == other and not any(self.coords[1:])
        return isinstance(other, NFElt) and self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash((self.field, self.coords))

    def __repr__(self):
        terms = [str(c) if k == 0 else f"{c}*x^{k}" for k, c in enumerate(self.coords) if c]
        return " + ".join(terms) or "0"


Matrix = tuple  # tuple of row tuples of NFElt


def _zeros(f: NumberField, rows: int, cols: int) -> Matrix:
    z = f.zero()
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def _identity(f: NumberField, d: int) -> Matrix:
    z, o = f.zero(), f.one()
    return tuple(tuple(o if i == j else z for j in range(d)) for i in range(d))


def _matmul(f: NumberField, x: Matrix, y: Matrix) -> Matrix:
    inner = len(y)
    cols = len(y[0]) if y else 0
    if x and len(x[0]) != inner:
        raise IsogenyError(f"cannot multiply a {len(x)}x{len(x[0])} block by a {inner}x{cols} block")
    out = []
    for row in x:
        new = []
        for j in range(cols):
            acc = f.zero()
            for k in range(inner):
                if not row[k].is_zero() and not y[k][j].is_zero():
                    acc = acc + row[k] * y[k][j]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def _matadd(x: Matrix, y: Matrix) -> Matrix:
    return tuple(tuple(a + b for a, b in zip(rx, ry)) for rx, ry in zip(x, y))


def _transpose(x: Matrix, rows: int, cols: int, f: NumberField) -> Matrix:
    if not rows or not cols:
        return _zeros(f, cols, rows)
    return tuple(tuple(x[i][j] for i in range(rows)) for j in range(cols))


@dataclass(frozen=True)
class SimpleFactor:
    label: str
    min_poly: tuple
    multiplicity: int

    def __post_init__(self):
        if self.multiplicity < 0:
            raise IsogenyError(f"multiplicity of {self.label} must be nonnegative")
        object.__setattr__(self, "min_poly", tuple(Fraction(c) for c in self.min_poly))

    @property
    def field(self) -> NumberField:
        return _field(self.min_poly)

    @property
    def field_degree(self) -> int:
        return self.field.degree

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "min_poly": [str(c) if c.denominator != 1 else int(c) for c in self.min_poly],
            "multiplicity": self.multiplicity,
        }


_FIELDS: dict[tuple, NumberField] = {}


def _field(min_poly: tuple) -> NumberField:
    f = _FIELDS.get(min_poly)
    if f is None:
        f = _FIELDS[min_poly] = NumberField(min_poly)
    return f


@dataclass(frozen=True)
class AlgebraSpec:
    factors: tuple[SimpleFactor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        labels = [f.label for f in self.factors]
        if len(set(labels)) != len(labels):
            raise IsogenyError(f"duplicate factor labels in {labels}")
        for f in self.factors:
            f.field  # validate eagerly

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.factors]

    def factor(self, label: str) -> SimpleFactor | None:
        for f in self.factors:
            if f.label == label:
                return f
        return None

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}

    @classmethod
    def from_json(cls, obj: Mapping) -> AlgebraSpec:
        try:
            return cls(tuple(
                SimpleFactor(str(f["label"]), tuple(Fraction(str(c)) for c in f["min_poly"]), int(f["multiplicity"]))
                for f in obj["factors"]
            ))
        except (KeyError, TypeError) as exc:
            raise IsogenyError(f"malformed algebra spec: {exc}") from exc


@dataclass(frozen=True)
class AlgebraElement:
    spec: AlgebraSpec
    blocks: dict  # label -> d x d matrix

    def __post_init__(self):
        for fac in self.spec.factors:
            block = self.blocks.get(fac.label)
            d = fac.multiplicity
            if block is None or len(block) != d or any(len(r) != d for r in block):
                raise IsogenyError(f"block for {fac.label} must be {d}x{d}")

    @classmethod
    def from_blocks(cls, spec: AlgebraSpec, blocks: Mapping[str, Sequence[Sequence]]) -> AlgebraElement:
        out = {}
        for fac in spec.factors:
            f = fac.field
            rows = blocks.get(fac.label)
            if rows is None:
                out[fac.label] = _zeros(f, fac.multiplicity, fac.multiplicity)
                continue
            out[fac.label] = tuple(tuple(_coerce(f, a) for a in r) for r in rows)
        return cls(spec, out)

    def _same(self, other: AlgebraElement):
        if not isinstance(other, AlgebraElement) or other.spec != self.spec:
            raise IsogenyError("endomorphisms of different Jacobians")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same(other)
        return AlgebraElement(self.spec, {k: _matadd(v, other.blocks[k]) for k, v in self.blocks.items()})

    def __mul__(self, other: AlgebraElement) -> AlgebraElement:
        self._same(other)
        return AlgebraElement(self.spec, {
            fac.label: _matmul(fac.field, self.blocks[fac.label], other.blocks[fac.label])
            for fac in self.spec.factors
        })

    def __eq__(self, other) -> bool:
        return isinstance(other, AlgebraElement) and self.spec == other.spec and self.blocks == other.blocks

    def is_zero(self) -> bool:
        return all(a.is_zero() for b in self.blocks.values() for r in b for a in r)


def _coerce(f: NumberField, a) -> NFElt:
    if isinstance(a, NFElt):
        if a.field != f:
            raise IsogenyError("block entry lives in the wrong field")
        return a
    if isinstance(a, (list, tuple)):
        return f.elt(a)
    return f.scalar(a)


def identity(spec: AlgebraSpec) -> AlgebraElement:
    return AlgebraElement(spec, {f.label: _identity(f.field, f.multiplicity) for f in spec.factors})


def zero(spec: AlgebraSpec) -> AlgebraElement:
    return AlgebraElement(spec, {f.label: _zeros(f.field, f.multiplicity, f.multiplicity) for f in spec.factors})


def isotypic_projector(spec: AlgebraSpec, label: str) -> AlgebraElement:
    """delta_A: the identity on the A-block, zero elsewhere.  Zero if A is absent."""
    blocks = {}
    for fac in spec.factors:
        d = fac.multiplicity
        if fac.label == label:
            # sum over the standard basis phi_k of (dual of phi_k) o phi_k
            acc = _zeros(fac.field, d, d)
            for k in range(d):
                col = tuple((e,) for e in _unit(fac.field, d, k))
                row = (_unit(fac.field, d, k),)
                acc = _matadd(acc, _matmul(fac.field, col, row))
            blocks[fac.label] = acc
        else:
            blocks[fac.label] = _zeros(fac.field, d, d)
    return AlgebraElement(spec, blocks)


def _unit(f: NumberField, d: int, k: int) -> tuple[NFElt, ...]:
    return tuple(f.one() if i == k else f.zero() for i in range(d))


def dual_pairing(phi: Sequence[NFElt], psi: Sequence[NFElt]) -> NFElt:
    """(phi, psi) -> phi o psi for phi in Hom(J, A) and psi in Hom(A, J)."""
    if len(phi) != len(psi):
        raise IsogenyError(f"pairing a length-{len(phi)} row with a length-{len(psi)} column")
    if not phi:
        raise IsogenyError("empty vectors have no field to pair in")
    f = phi[0].field
    acc = f.zero()
    for a, b in zip(phi, psi):
        acc = acc + _coerce(f, a) * _coerce(f, b)
    return acc


def standard_basis(fac: SimpleFactor) -> list[tuple[NFElt, ...]]:
    return [_unit(fac.field, fac.multiplicity, k) for k in range(fac.multiplicity)]


def dual_basis(fac: SimpleFactor) -> list[tuple[NFElt, ...]]:
    return standard_basis(fac)


def transpose(spec: AlgebraSpec, x: AlgebraElement) -> AlgebraElement:
    if x.spec != spec:
        raise IsogenyError("element does not belong to this algebra")
    return AlgebraElement(spec, {
        fac.label: _transpose(x.blocks[fac.label], fac.multiplicity, fac.multiplicity, fac.field)
        for fac in spec.factors
    })


@dataclass(frozen=True)
class HomElement:
    """An element of Hom(J, J') (x) Q; blocks are d'_A x d_A over shared labels."""

    src: AlgebraSpec
    dst: AlgebraSpec
    blocks: dict

    def __post_init__(self):
        shared = set(shared_labels(self.src, self.dst))
        if set(self.blocks) != shared:
            raise IsogenyError(f"blocks must be given exactly for the shared factors {sorted(shared)}")
        for label in shared:
            rows, cols = self.dst.factor(label).multiplicity, self.src.factor(label).multiplicity
            b = self.blocks[label]
            if len(b) != rows or any(len(r) != cols for r in b):
                raise IsogenyError(f"block for {label} must be {rows}x{cols}")

    @classmethod
    def from_blocks(cls, src: AlgebraSpec, dst: AlgebraSpec, blocks: Mapping) -> HomElement:
        out = {}
        for label in shared_labels(src, dst):
            fs, fd = src.factor(label), dst.factor(label)
            f = fs.field
            if fd.field != f:
                raise IsogenyError(f"factor {label} has different fields in source and target")
            rows = blocks.get(label)
            if rows is None:
                out[label] = _zeros(f, fd.multiplicity, fs.multiplicity)
            else:
                out[label] = tuple(tuple(_coerce(f, a) for a in r) for r in rows)
        return cls(src, dst, out)

    def is_zero(self) -> bool:
        return all(a.is_zero() for b in self.blocks.values() for r in b for a in r)


def shared_labels(src: AlgebraSpec, dst: AlgebraSpec) -> list[str]:
    theirs = set(dst.labels)
    return [lab for lab in src.labels if lab in theirs]


def compose(left: AlgebraElement, z: HomElement, right: AlgebraElement) -> HomElement:
    """left o z o right, for left in End(J') and right in End(J)."""
    if left.spec != z.dst or right.spec != z.src:
        raise IsogenyError("composition of incompatible maps")
    out = {}
    for label, block in z.blocks.items():
        f = z.src.factor(label).field
        out[label] = _matmul(f, _matmul(f, left.blocks[label], block), right.blocks[label])
    return HomElement(z.src, z.dst, out)


def mterms_check(spec_j: AlgebraSpec, spec_j2: AlgebraSpec, z: HomElement, label: str) -> bool:
    """delta'_i z delta_X = delta'_i z delta_i = delta_X' z delta_i, where the
    deltas without index are identities."""
    if z.src != spec_j or z.dst != spec_j2:
        raise IsogenyError("z is not a homomorphism between the given Jacobians")
    d_i = isotypic_projector(spec_j, label)
    d2_i = isotypic_projector(spec_j2, label)
    one, one2 = identity(spec_j), identity(spec_j2)
    a = compose(d2_i, z, one)
    b = compose(d2_i, z, d_i)
    c = compose(one2, z, d_i)
    return a == b == c


def projector_decomposition_check(spec: AlgebraSpec) -> bool:
    """1 = sum of the isotypic projectors, which are orthogonal idempotents."""
    projs = [isotypic_projector(spec, lab) for lab in spec.labels]
    total = zero(spec)
    for p in projs:
        total = total + p
    if total != identity(spec):
        return False
    for i, p in enumerate(projs):
        if p * p != p:
            return False
        for q in projs[i + 1:]:
            if not (p * q).is_zero() or not (q * p).is_zero():
                return False
    return True


def random_element(spec: AlgebraSpec, rng, height: int = 5) -> AlgebraElement:
    blocks = {}
    for fac in spec.factors:
        f, d = fac.field, fac.multiplicity
        blocks[fac.label] = [[f.elt([rng.randint(-height, height) for _ in range(f.degree)]) for _ in range(d)]
                             for _ in range(d)]
    return AlgebraElement.from_blocks(spec, blocks)


def random_hom(src: AlgebraSpec, dst: AlgebraSpec, rng, height: int = 5) -> HomElement:
    blocks = {}
    for label in shared_labels(src, dst):
        f = src.factor(label).field
        rows, cols = dst.factor(label).multiplicity, src.factor(label).multiplicity
        blocks[label] = [[f.elt([rng.randint(-height, height) for _ in range(f.degree)]) for _ in range(cols)]
                         for _ in range(rows)]
    return HomElement.from_blocks(src, dst, blocks)


TOTALLY_REAL_POLYS: tuple[tuple[int, ...], ...] = (
    (0, 1),            # Q
    (-2, 0, 1),        # x^2 - 2
    (-5, 0, 1),        # x^2 - 5
    (-1, -1, 1),       # x^2 - x - 1
    (-1, -3, 0, 1),    # x^3 - 3x - 1
    (1, -4, 0, 1),     # x^3 - 4x + 1
    (-1, -2, 1, 1),    # x^3 + x^2 - 2x - 1
)


def random_spec(rng, max_factors: int = 4, max_mult: int = 3, pool: Mapping[str, tuple] | None = None) -> AlgebraSpec:
    """A random spec; labels drawn from ``pool`` keep their field across specs."""
    if pool is None:
        pool = {f"A{i}": rng.choice(TOTALLY_REAL_POLYS) for i in range(max_factors)}
    labels = rng.sample(sorted(pool), min(rng.randint(0, max_factors), len(pool)))
    return AlgebraSpec(tuple(SimpleFactor(lab, pool[lab], rng.randint(0, max_mult)) for lab in sorted(labels)))
