"""Character tables of cyclic and dihedral groups, and trilinear multiplicities.

Dihedral(n) has order 2n with presentation <r, s | r^n = s^2 = 1, srs = r^-1>.
Group elements are encoded as pairs ``(k, e)`` meaning ``r^k s^e``.

Irreducible representations carry stable string labels:

* dihedral: ``triv``; ``sgn`` (r -> 1, s -> -1); for even n also ``sgn'``
  (r -> -1, s -> 1) and ``sgn''`` (r -> -1, s -> -1); and the two-dimensional
  ``V_j`` for 1 <= j < n/2, with r -> diag(z^j, z^-j) and s -> swap.
* cyclic: ``chi_k`` for 0 <= k < n, with r -> z^k.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .cyclotomic import CycloElt, zeta


class RepTableError(RuntimeError):
    """A character computation produced a value that cannot be a multiplicity."""


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "cyclic" | "dihedral"
    n: int

    def __post_init__(self):
        if self.kind not in ("cyclic", "dihedral"):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "cyclic" and self.n < 1:
            raise ValueError("Cyclic(n) needs n >= 1")
        if self.kind == "dihedral" and self.n < 3:
            raise ValueError("Dihedral(n) needs n >= 3")

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls("cyclic", n)

    @classmethod
    def dihedral(cls, n: int) -> GroupSpec:
        return cls("dihedral", n)

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        m = re.fullmatch(r"\s*(cyclic|dihedral|C|D)\s*\(?\s*(\d+)\s*\)?\s*", text, re.I)
        if not m:
            raise ValueError(f"cannot parse group {text!r}")
        kind = m.group(1).lower()
        kind = {"c": "cyclic", "d": "dihedral"}.get(kind, kind)
        return cls(kind, int(m.group(2)))

    @property
    def order(self) -> int:
        return self.n if self.kind == "cyclic" else 2 * self.n

    def elements(self) -> list[tuple[int, int]]:
        flips = (0,) if self.kind == "cyclic" else (0, 1)
        return [(k, e) for e in flips for k in range(self.n)]

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n}

    def __str__(self) -> str:
        return f"{self.kind.capitalize()}({self.n})"


@dataclass(frozen=True)
class ConjClass:
    rep: str
    size: int
    element: tuple[int, int]


@dataclass(frozen=True)
class IrrepLabel:
    name: str
    dim: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CharacterTable:
    group: GroupSpec
    classes: tuple[ConjClass, ...]
    rows: dict  # IrrepLabel -> tuple[CycloElt, ...]

    @property
    def labels(self) -> list[IrrepLabel]:
        return list(self.rows)

    def label(self, name: str | IrrepLabel) -> IrrepLabel:
        if isinstance(name, IrrepLabel):
            name = name.name
        for lab in self.rows:
            if lab.name == name:
                return lab
        raise KeyError(f"{name!r} is not an irreducible representation of {self.group}")

    def row(self, name: str | IrrepLabel) -> tuple[CycloElt, ...]:
        return self.rows[self.label(name)]


def _word(k: int, e: int) -> str:
    rot = "e" if k == 0 else ("r" if k == 1 else f"r^{k}")
    if not e:
        return rot
    return "s" if k == 0 else f"{rot}s"


def _classes(g: GroupSpec) -> list[ConjClass]:
    n = g.n
    if g.kind == "cyclic":
        return [ConjClass(_word(k, 0), 1, (k, 0)) for k in range(n)]
    out = [ConjClass("e", 1, (0, 0))]
    for k in range(1, (n - 1) // 2 + 1):
        out.append(ConjClass(_word(k, 0), 2, (k, 0)))
    if n % 2 == 0:
        out.append(ConjClass(_word(n // 2, 0), 1, (n // 2, 0)))
        out.append(ConjClass("s", n // 2, (0, 1)))
        out.append(ConjClass("rs", n // 2, (1, 1)))
    else:
        out.append(ConjClass("s", n, (0, 1)))
    return out


def irrep_labels(g: GroupSpec) -> list[IrrepLabel]:
    n = g.n
    if g.kind == "cyclic":
        return [IrrepLabel(f"chi_{k}", 1) for k in range(n)]
    labels = [IrrepLabel("triv", 1), IrrepLabel("sgn", 1)]
    if n % 2 == 0:
        labels += [IrrepLabel("sgn'", 1), IrrepLabel("sgn''", 1)]
    labels += [IrrepLabel(f"V_{j}", 2) for j in range(1, (n + 1) // 2)]
    return labels


def character_value(g: GroupSpec, label: IrrepLabel, element: tuple[int, int]) -> CycloElt:
    n = g.n
    k, e = element
    name = label.name
    if g.kind == "cyclic":
        idx = int(name.split("_")[1])
        return zeta(n, idx * k)
    if name.startswith("V_"):
        if e:
            return CycloElt.zero(n)
        j = int(name[2:])
        return zeta(n, j * k) + zeta(n, -j * k)
    r_sign = -1 if name in ("sgn'", "sgn''") else 1
    s_sign = -1 if name in ("sgn", "sgn''") else 1
    return CycloElt.from_rational(n, r_sign ** k * s_sign ** e)


@lru_cache(maxsize=None)
def character_table(g: GroupSpec) -> CharacterTable:
    classes = tuple(_classes(g))
    rows = {
        lab: tuple(character_value(g, lab, c.element) for c in classes)
        for lab in irrep_labels(g)
    }
    return CharacterTable(g, classes, rows)


def _class_sum(table: CharacterTable, values) -> Fraction:
    g = table.group
    total = CycloElt.zero(g.n)
    for cls, v in zip(table.classes, values):
        total = total + v * cls.size
    total = total / g.order
    q = total.rational_part()
    if q is None:
        raise RepTableError(f"irrational character sum over {g}: {total!r}")
    return q


def _as_multiplicity(q: Fraction, what: str) -> int:
    if q.denominator != 1 or q < 0:
        raise RepTableError(f"{what} is {q}, not a nonnegative integer")
    return int(q)


def trilinear_multiplicity(g: GroupSpec, a, b, c) -> int:
    """dim Hom_G(a (x) b (x) c, 1) from the character sum (1/|G|) sum chi_a chi_b chi_c."""
    table = character_table(g)
    ra, rb, rc = table.row(a), table.row(b), table.row(c)
    q = _class_sum(table, [x * y * z for x, y, z in zip(ra, rb, rc)])
    return _as_multiplicity(q, f"multiplicity of ({a}, {b}, {c}) in {g}")


def tensor_decompose(g: GroupSpec, a, b) -> dict[str, int]:
    """Multiplicities of each irreducible in a (x) b; zero entries are dropped."""
    table = character_table(g)
    ra, rb = table.row(a), table.row(b)
    prod = [x * y for x, y in zip(ra, rb)]
    out = {}
    for lab, rc in table.rows.items():
        q = _class_sum(table, [x * z.conjugate() for x, z in zip(prod, rc)])
        m = _as_multiplicity(q, f"<{a}{b}, {lab}> in {g}")
        if m:
            out[lab.name] = m
    return out


def dual_label(g: GroupSpec, a) -> str:
    lab = character_table(g).label(a)
    if g.kind == "cyclic":
        k = int(lab.name.split("_")[1])
        return f"chi_{(-k) % g.n}"
    return lab.name


# --- independent oracle: explicit matrix models ---------------------------

def _mat_mul(x, y):
    n, m, p = len(x), len(y), len(y[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                a, b = x[i][k], y[k][j]
                if a.is_zero() or b.is_zero():
                    continue
                acc = a * b if acc is None else acc + a * b
            row.append(acc if acc is not None else CycloElt.zero(x[0][0].modulus))
        out.append(row)
    return out


def _kron(x, y):
    return [
        [a * b for a in xr for b in yr]
        for xr in x
        for yr in y
    ]


def rep_matrix(g: GroupSpec, label, element: tuple[int, int]):
    """Explicit matrix of ``element`` in the representation ``label``."""
    lab = character_table(g).label(label)
    n = g.n
    k, e = element
    if lab.dim == 1:
        return [[character_value(g, lab, element)]]
    j = int(lab.name[2:])
    zero = CycloElt.zero(n)
    if not e:
        return [[zeta(n, j * k), zero], [zero, zeta(n, -j * k)]]
    # r^k s = r^k * swap
    return [[zero, zeta(n, j * k)], [zeta(n, -j * k), zero]]


def averaging_operator(g: GroupSpec, a, b, c):
    """(1/|G|) sum_x rho_a(x) (x) rho_b(x) (x) rho_c(x), as an exact matrix."""
    acc: dict[tuple[int, int], CycloElt] = {}
    size = None
    for x in g.elements():
        m = _kron(_kron(rep_matrix(g, a, x), rep_matrix(g, b, x)), rep_matrix(g, c, x))
        size = len(m)
        for i, row in enumerate(m):
            for j, v in enumerate(row):
                if not v.is_zero():
                    acc[i, j] = acc[i, j] + v if (i, j) in acc else v
    zero = CycloElt.zero(g.n)
    return [
        [acc[i, j] / g.order if (i, j) in acc else zero for j in range(size)]
        for i in range(size)
    ]


def oracle_multiplicity(g: GroupSpec, a, b, c, check_idempotent: bool = False) -> int:
    """Trace of the averaging projector onto invariants; independent of the character table."""
    p = averaging_operator(g, a, b, c)
    if check_idempotent and _mat_mul(p, p) != p:
        raise RepTableError(f"averaging operator for ({a}, {b}, {c}) in {g} is not idempotent")
    tr = p[0][0]
    for i in range(1, len(p)):
        tr = tr + p[i][i]
    q = tr.rational_part()
    if q is None:
        raise RepTableError(f"irrational trace of averaging operator in {g}")
    return _as_multiplicity(q, "trace of averaging operator")


def all_triples(g: GroupSpec):
    names = [lab.name for lab in irrep_labels(g)]
    return product(names, repeat=3)
