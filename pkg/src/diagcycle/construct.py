"""Towers of totally real quadratic extensions split at a place, and almost
definite quaternion algebras whose local invariants defeat a list of local signs.

Given three newform orbits whose local components at v are discrete series, the
pipeline enumerates the n embedding triples, builds a tower E of degree 2^r > n
with 2^r degree-one places v_1..v_m over v, and picks a quaternion algebra D over
E, split at exactly one real place, with eps(D_{v_k}) != eps_k for k <= n.  The
local form for the k-th triple then vanishes at v_k.

Layers above the first are bookkeeping: places are named, not computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

from .arith import (
    MINUS,
    PLUS,
    QQ,
    FieldDesc,
    ParityError,
    Place,
    QuaternionAlgebra,
    find_real_quadratic_split,
    hasse_invariant,
    is_prime,
    is_squarefree,
    splits_in_real_quadratic,
)
from .data import Dataset
from .localglobal import INCONCLUSIVE, LocalComponent, local_triple_verdict


class ConstructionError(ValueError):
    pass


class HypothesisError(ConstructionError):
    """An input component is not a discrete series at the chosen place."""


@dataclass(frozen=True)
class TowerPlace:
    place: Place
    over: Place
    residue_degree: int = 1

    def to_json(self) -> dict:
        return {"place": str(self.place), "over": str(self.over), "residue_degree": self.residue_degree}

    @classmethod
    def from_json(cls, obj: Mapping) -> TowerPlace:
        return cls(Place.parse(obj["place"]), Place.parse(obj["over"]), int(obj["residue_degree"]))


@dataclass(frozen=True)
class TowerDesc:
    base: FieldDesc
    layers: int
    split_place: Place
    places_over: tuple[TowerPlace, ...]
    first_layer_d: int | None = None

    @property
    def m(self) -> int:
        return len(self.places_over)

    @property
    def field(self) -> FieldDesc:
        if self.layers == 0:
            return self.base
        return FieldDesc(f"{self.base.label}^({self.layers})", self.base.degree * 2 ** self.layers)

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "layers": self.layers,
            "split_place": str(self.split_place),
            "places_over": [p.to_json() for p in self.places_over],
            "first_layer_d": self.first_layer_d,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> TowerDesc:
        return cls(
            FieldDesc.from_json(obj["base"]),
            int(obj["layers"]),
            Place.parse(obj["split_place"]),
            tuple(TowerPlace.from_json(p) for p in obj["places_over"]),
            obj.get("first_layer_d"),
        )


def build_split_tower(base: FieldDesc, v: Place, r: int) -> TowerDesc:
    """r successive totally real quadratic layers, each split at every place over v."""
    if v.is_real:
        raise ConstructionError(f"{v} is not a finite place")
    if not v.belongs_to(base):
        raise ConstructionError(f"{v} is not a place of {base.label}")
    if r < 0:
        raise ConstructionError("the number of layers must be nonnegative")
    if r == 0:
        return TowerDesc(base, 0, v, (TowerPlace(v, v),))
    d = find_real_quadratic_split([v.prime]) if base.is_rational() else None
    tag = str(v) if v.prime is not None else v.label
    places = tuple(TowerPlace(Place.finite(f"{tag}.{k}"), v) for k in range(1, 2 ** r + 1))
    return TowerDesc(base, r, v, places, d)


def select_quaternion(tower: TowerDesc, constraints: Sequence[tuple[int, int]]) -> QuaternionAlgebra:
    """Almost definite algebra over the tower field with eps(D_{v_k}) != eps_k.

    Ramified: every real place but the first, each v_k with eps_k = +1, and if
    that count is odd the free place v_j of lowest index.
    """
    m = tower.m
    cons = dict(constraints)
    if len(cons) != len(constraints):
        raise ConstructionError("each index may be constrained once")
    for k, eps in cons.items():
        if not 1 <= k <= m:
            raise ConstructionError(f"constraint index {k} outside 1..{m}")
        if eps not in (PLUS, MINUS):
            raise ConstructionError(f"forbidden sign must be +1 or -1, got {eps}")
    if len(cons) >= m:
        raise ConstructionError(f"{len(cons)} constraints need more than {m} places: no slack place for parity")
    f = tower.field
    ram = {Place.real(i) for i in range(1, f.real_places)}
    ram.update(tower.places_over[k - 1].place for k, eps in cons.items() if eps == PLUS)
    if len(ram) % 2:
        free = min(k for k in range(1, m + 1) if k not in cons)
        ram.add(tower.places_over[free - 1].place)
    return QuaternionAlgebra(f, frozenset(ram))


@dataclass(frozen=True)
class OrbitInput:
    label: str
    hecke_degree: int
    components: tuple[LocalComponent, ...]  # one per embedding

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "hecke_degree": self.hecke_degree,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> OrbitInput:
        return cls(str(obj["label"]), int(obj["hecke_degree"]),
                   tuple(LocalComponent.from_json(c) for c in obj["components"]))


@dataclass(frozen=True)
class ConstructionCertificate:
    inputs: tuple[OrbitInput, OrbitInput, OrbitInput]
    prime: int
    n: int
    embedding_triples: tuple[tuple[int, int, int], ...]
    epsilons: tuple[int, ...]
    tower: TowerDesc
    algebra_base: FieldDesc
    ramified: tuple[Place, ...]
    witnesses: dict = field(default_factory=dict)  # k -> Place
    notes: tuple[str, ...] = ()

    def algebra(self) -> QuaternionAlgebra:
        return QuaternionAlgebra(self.algebra_base, frozenset(self.ramified))

    def to_json(self) -> dict:
        return {
            "inputs": [i.to_json() for i in self.inputs],
            "prime": self.prime,
            "n": self.n,
            "embedding_triples": [list(t) for t in self.embedding_triples],
            "epsilons": list(self.epsilons),
            "tower": self.tower.to_json(),
            "algebra": {"base": self.algebra_base.to_json(), "ramified": [str(v) for v in self.ramified]},
            "witnesses": {str(k): str(v) for k, v in sorted(self.witnesses.items())},
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> ConstructionCertificate:
        alg = obj["algebra"]
        return cls(
            tuple(OrbitInput.from_json(i) for i in obj["inputs"]),
            int(obj["prime"]),
            int(obj["n"]),
            tuple(tuple(int(x) for x in t) for t in obj["embedding_triples"]),
            tuple(int(e) for e in obj["epsilons"]),
            TowerDesc.from_json(obj["tower"]),
            FieldDesc.from_json(alg["base"]),
            tuple(Place.parse(v) for v in alg["ramified"]),
            {int(k): Place.parse(v) for k, v in obj["witnesses"].items()},
            tuple(obj.get("notes", ())),
        )


def _triple_epsilon(v: Place, comps: Sequence[LocalComponent]) -> int:
    verdict = local_triple_verdict(v, comps, True)
    if verdict.outcome == INCONCLUSIVE or verdict.epsilon is None:
        raise HypothesisError(
            f"local sign at {v} is not determined by the data for "
            f"({', '.join(c.kind for c in comps)}); per-embedding signs must be certified"
        )
    return verdict.epsilon


def _minimal_layers(n: int) -> int:
    r = 0
    while 2 ** r <= n:
        r += 1
    return r


def pipeline_from_inputs(inputs: Sequence[OrbitInput], p: int) -> ConstructionCertificate:
    v = Place.finite(p)
    for inp in inputs:
        if len(inp.components) != inp.hecke_degree:
            raise ConstructionError(f"{inp.label}: {len(inp.components)} components for degree {inp.hecke_degree}")
        for c in inp.components:
            if not c.is_discrete:
                raise HypothesisError(f"{inp.label} is not a discrete series at {p} ({c.kind})")
    triples = tuple(product(*(range(i.hecke_degree) for i in inputs)))  # lexicographic order on J
    n = len(triples)
    eps = tuple(
        _triple_epsilon(v, [inputs[j].components[t[j]] for j in range(3)]) for t in triples
    )
    r = _minimal_layers(n)
    tower = build_split_tower(QQ, v, r)
    alg = select_quaternion(tower, list(enumerate(eps, start=1)))
    witnesses = {k: tower.places_over[k - 1].place for k in range(1, n + 1)}
    notes = []
    if all(c.kind == "special" for i in inputs for c in i.components):
        notes.append("all components Special: eps_k is the Atkin-Lehner sign product, the same for every k")
    return ConstructionCertificate(
        tuple(inputs), p, n, triples, eps, tower, alg.base,
        tuple(sorted(alg.ramified)), witnesses, tuple(notes),
    )


def vanishing_pipeline(ds: Dataset, labels: Sequence[str], p: int) -> ConstructionCertificate:
    if len(labels) != 3:
        raise ConstructionError("the pipeline takes three newform orbits")
    if not is_prime(p):
        raise ConstructionError(f"{p} is not prime")
    inputs = []
    for lab in labels:
        orbit = ds.orbit(lab)
        comps = ds.local_components(lab, p)
        if comps is None:
            raise HypothesisError(f"{lab}: local type at {p} is unresolved; a certificate is required")
        inputs.append(OrbitInput(lab, orbit.hecke_degree, tuple(comps)))
    return pipeline_from_inputs(inputs, p)


def verify_certificate(c: ConstructionCertificate) -> tuple[bool, list[str]]:
    """Re-derive every claim in ``c``; returns (ok, names of failed checks)."""
    failures: list[str] = []
    t = c.tower
    v = Place.finite(c.prime)

    if t.m != 2 ** t.layers:
        failures.append("tower size: m != 2^r")
    if t.split_place != v:
        failures.append("tower split place")
    if any(tp.over != t.split_place or tp.residue_degree != 1 for tp in t.places_over):
        failures.append("degree-one places over v")
    if len({tp.place for tp in t.places_over}) != t.m:
        failures.append("tower places distinct")
    if t.layers > 0 and t.base.is_rational():
        d = t.first_layer_d
        if d is None or d < 2 or not is_squarefree(d) or not splits_in_real_quadratic(d, c.prime):
            failures.append("first layer splits at v")

    degrees = [i.hecke_degree for i in c.inputs]
    n = degrees[0] * degrees[1] * degrees[2]
    if c.n != n:
        failures.append("n = product of Hecke degrees")
    if not c.n < t.m:
        failures.append("m > n")
    expected_triples = tuple(product(*(range(d) for d in degrees)))
    if c.embedding_triples != expected_triples or len(c.epsilons) != len(expected_triples):
        failures.append("embedding triples")
    else:
        try:
            for k, (tr, e) in enumerate(zip(expected_triples, c.epsilons), start=1):
                comps = [c.inputs[j].components[tr[j]] for j in range(3)]
                if any(not x.is_discrete for x in comps) or _triple_epsilon(v, comps) != e:
                    failures.append(f"local sign eps_{k}")
        except (HypothesisError, IndexError, ValueError):
            failures.append("local signs recomputable")

    if c.algebra_base != t.field:
        failures.append("algebra over the tower field")
    ram = set(c.ramified)
    if len(ram) != len(c.ramified):
        failures.append("ramified places distinct")
    if len(ram) % 2:
        failures.append("Hasse parity")
    real_ram = {x for x in ram if x.is_real}
    if any(x.index >= c.algebra_base.real_places for x in real_ram):
        failures.append("real places exist")
    if len(real_ram) != c.algebra_base.real_places - 1:
        failures.append("almost definite")
    tower_places = {tp.place for tp in t.places_over}
    if any(not x.is_real and x not in tower_places for x in ram):
        failures.append("finite ramification inside the tower places")

    if sorted(c.witnesses) != list(range(1, c.n + 1)):
        failures.append("one witness per embedding triple")
    for k, w in sorted(c.witnesses.items()):
        if not 1 <= k <= t.m or t.places_over[k - 1].place != w:
            failures.append(f"witness {k} is v_{k}")
            continue
        if k > len(c.epsilons):
            continue
        local = MINUS if w in ram else PLUS
        if local == c.epsilons[k - 1]:
            failures.append(f"witness {k}: eps(D_v) != eps_k")
    if "Hasse parity" not in failures and not failures:
        try:
            alg = c.algebra()
            for k, w in c.witnesses.items():
                if hasse_invariant(alg, w) == c.epsilons[k - 1]:
                    failures.append(f"witness {k}: eps(D_v) != eps_k")
        except ParityError:
            failures.append("Hasse parity")
    return (not failures, failures)
