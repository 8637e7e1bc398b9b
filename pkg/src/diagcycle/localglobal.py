"""Local components, the trilinear-form dichotomy at each place, and root numbers.

At a finite place v the triple (pi_1, pi_2, pi_3) has a local sign eps_v in
{+1, -1}.  When the local quaternion algebra B_v is split, a GL_2-invariant
trilinear form exists iff eps_v = +1; when B_v is ramified the form on the
division-algebra side exists iff eps_v = -1.  For three Special components the
sign is the product of the Atkin-Lehner eigenvalues at v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .arith import MINUS, PLUS, FieldDesc, Place, QuaternionAlgebra
from .repcore import GroupSpec, RepTableError, trilinear_multiplicity

UNRAMIFIED_PS = "unramified_ps"
RAMIFIED_PS = "ramified_ps"
SPECIAL = "special"
SC_DIHEDRAL = "sc_dihedral"
SC_OPAQUE = "sc_opaque"

KINDS = (UNRAMIFIED_PS, RAMIFIED_PS, SPECIAL, SC_DIHEDRAL, SC_OPAQUE)
DISCRETE_KINDS = frozenset({SPECIAL, SC_DIHEDRAL, SC_OPAQUE})

VANISHES = "Vanishes"
FORM_EXISTS = "FormExists"
INCONCLUSIVE = "Inconclusive"

L_VALUE_CITATION = "global sign -1: the functional equation forces the central value to vanish"


class LocalDataError(ValueError):
    """Local data that cannot occur for the requested place."""


class RootNumberError(ValueError):
    pass


@dataclass(frozen=True)
class LocalComponent:
    """One local component pi_v.

    ``al_sign`` is the Atkin-Lehner sign of a Special component; it is None for
    a Special component twisted by a ramified character, whose sign is not
    determined by the data.  ``group``/``label`` describe a supercuspidal whose
    Jacquet-Langlands transfer factors through a dihedral or cyclic quotient.
    """

    kind: str
    al_sign: int | None = None
    group: GroupSpec | None = None
    label: str | None = None
    certificate_id: str | None = None
    central_character_trivial: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise LocalDataError(f"unknown local component kind {self.kind!r}")
        if self.kind == SPECIAL and self.al_sign not in (None, PLUS, MINUS):
            raise LocalDataError(f"Atkin-Lehner sign must be +1 or -1, got {self.al_sign}")
        if self.kind == SC_DIHEDRAL:
            if self.group is None or self.label is None:
                raise LocalDataError("dihedral supercuspidal needs a group and a label")
            from .repcore import character_table
            character_table(self.group).label(self.label)

    @property
    def is_discrete(self) -> bool:
        return self.kind in DISCRETE_KINDS

    @classmethod
    def unramified(cls) -> LocalComponent:
        return cls(UNRAMIFIED_PS)

    @classmethod
    def ramified_ps(cls) -> LocalComponent:
        return cls(RAMIFIED_PS)

    @classmethod
    def special(cls, al_sign: int | None) -> LocalComponent:
        return cls(SPECIAL, al_sign=al_sign)

    @classmethod
    def dihedral(cls, group: GroupSpec, label: str, certificate_id: str | None = None) -> LocalComponent:
        return cls(SC_DIHEDRAL, group=group, label=label, certificate_id=certificate_id)

    @classmethod
    def opaque(cls, certificate_id: str | None = None) -> LocalComponent:
        return cls(SC_OPAQUE, certificate_id=certificate_id)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == SPECIAL:
            out["al_sign"] = self.al_sign
        if self.group is not None:
            out["group"] = self.group.to_json()
            out["label"] = self.label
        if self.certificate_id is not None:
            out["certificate_id"] = self.certificate_id
        if not self.central_character_trivial:
            out["central_character_trivial"] = False
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> LocalComponent:
        group = obj.get("group")
        if group is not None:
            group = GroupSpec(str(group["kind"]), int(group["n"]))
        return cls(
            kind=str(obj["kind"]),
            al_sign=obj.get("al_sign"),
            group=group,
            label=obj.get("label"),
            certificate_id=obj.get("certificate_id"),
            central_character_trivial=bool(obj.get("central_character_trivial", True)),
        )


@dataclass(frozen=True)
class Resolution:
    """An externally certified answer for one triple at one place.

    ``hom_gl2`` is dim Hom_{GL_2}(pi_1 x pi_2 x pi_3, C), either 0 or 1.
    """

    certificate_id: str
    hom_gl2: int

    def __post_init__(self):
        if self.hom_gl2 not in (0, 1):
            raise LocalDataError(f"certified GL_2 multiplicity must be 0 or 1, got {self.hom_gl2}")


@dataclass(frozen=True)
class TripleLocalVerdict:
    place: Place
    outcome: str
    reason: str | None = None
    epsilon: int | None = None
    missing: tuple[str, ...] = ()

    @property
    def decided(self) -> bool:
        return self.outcome != INCONCLUSIVE

    def to_json(self) -> dict:
        out = {
            "place": str(self.place),
            "outcome": self.outcome,
            "reason": self.reason,
            "epsilon": self.epsilon,
        }
        if self.missing:
            out["missing"] = list(self.missing)
        return out


@dataclass(frozen=True)
class RootNumberResult:
    local_signs: dict = field(default_factory=dict)
    global_sign: int = PLUS
    l_value_forced_zero: bool = False
    citation: str | None = None

    def to_json(self) -> dict:
        return {
            "local_signs": {str(v): s for v, s in sorted(self.local_signs.items())},
            "global_sign": self.global_sign,
            "l_value_forced_zero": self.l_value_forced_zero,
            "citation": self.citation,
        }


def central_character_ok(c1: LocalComponent, c2: LocalComponent, c3: LocalComponent) -> bool:
    return c1.central_character_trivial and c2.central_character_trivial and c3.central_character_trivial


def _from_epsilon(v: Place, eps: int, split: bool, reason: str) -> TripleLocalVerdict:
    # split: GL_2 form exists iff eps = +1; ramified: D^x form exists iff eps = -1
    exists = (eps == PLUS) if split else (eps == MINUS)
    return TripleLocalVerdict(v, FORM_EXISTS if exists else VANISHES, reason, eps)


def _dihedral_multiplicity(comps: Sequence[LocalComponent]) -> int:
    g = comps[0].group
    m = trilinear_multiplicity(g, comps[0].label, comps[1].label, comps[2].label)
    if m not in (0, 1):
        raise RepTableError(
            f"multiplicity {m} for ({', '.join(c.label for c in comps)}) on {g}; "
            "a trilinear form on an irreducible triple is unique"
        )
    return m


def local_triple_verdict(
    v: Place,
    comps: Sequence[LocalComponent],
    b_v_split: bool,
    resolution: Resolution | None = None,
) -> TripleLocalVerdict:
    """Decide whether the local trilinear form for ``comps`` exists at ``v``.

    ``b_v_split`` says whether the quaternion algebra is split at ``v``.
    ``resolution``, if given, settles triples the rules below cannot decide.
    """
    comps = tuple(comps)
    if len(comps) != 3:
        raise LocalDataError(f"expected three local components, got {len(comps)}")
    if not central_character_ok(*comps):
        return TripleLocalVerdict(v, VANISHES, "central-character", None)

    if not all(c.is_discrete for c in comps):
        if not b_v_split:
            raise LocalDataError(
                f"non-discrete-series component at {v}, where the quaternion algebra is ramified"
            )
        # the Jacquet-Langlands side is zero, so the GL_2 side carries the form
        return TripleLocalVerdict(v, FORM_EXISTS, "jl-zero", PLUS)

    kinds = {c.kind for c in comps}
    if kinds == {SPECIAL} and all(c.al_sign is not None for c in comps):
        eps = comps[0].al_sign * comps[1].al_sign * comps[2].al_sign
        return _from_epsilon(v, eps, b_v_split, "al-sign-product")

    if kinds == {SC_DIHEDRAL} and len({c.group for c in comps}) == 1:
        m = _dihedral_multiplicity(comps)
        # m is the division-algebra side; the GL_2 side is 1 - m
        eps = MINUS if m == 1 else PLUS
        return _from_epsilon(v, eps, b_v_split, "dihedral-trilinear")

    if resolution is not None:
        eps = PLUS if resolution.hom_gl2 == 1 else MINUS
        return _from_epsilon(v, eps, b_v_split, f"certificate:{resolution.certificate_id}")

    missing = sorted({c.certificate_id or f"local-type@{v}" for c in comps if c.kind != SPECIAL or c.al_sign is None})
    if not missing:
        missing = [f"mixed-triple@{v}"]
    return TripleLocalVerdict(v, INCONCLUSIVE, None, None, tuple(missing))


def archimedean_epsilon() -> int:
    """Local sign at a real place for a triple of weight-2 discrete series."""
    return MINUS


def global_root_number(base: FieldDesc, finite_verdicts: Iterable[TripleLocalVerdict]) -> RootNumberResult:
    signs: dict[Place, int] = {}
    for verdict in finite_verdicts:
        if verdict.place.is_real:
            raise RootNumberError(f"{verdict.place} is not a finite place")
        if verdict.epsilon is None:
            raise RootNumberError(f"unknown local sign at {verdict.place}")
        signs[verdict.place] = verdict.epsilon
    for v in base.infinite_places():
        signs[v] = archimedean_epsilon()
    total = PLUS
    for s in signs.values():
        total *= s
    forced = total == MINUS
    return RootNumberResult(signs, total, forced, L_VALUE_CITATION if forced else None)


def supporting_quaternion(base: FieldDesc, finite_signs: Mapping[Place, int]) -> QuaternionAlgebra | None:
    """The quaternion algebra B with eps(B_v) = eps_v at every place, if one exists.

    Real places always carry eps = -1, so they are always ramified in B.
    """
    ram = set(base.infinite_places())
    for v, s in finite_signs.items():
        if s not in (PLUS, MINUS):
            raise LocalDataError(f"local sign at {v} must be +1 or -1, got {s}")
        if v.is_real:
            raise LocalDataError(f"{v} is not a finite place")
        if s == MINUS:
            ram.add(v)
    if len(ram) % 2:
        return None
    return QuaternionAlgebra(base, frozenset(ram))
