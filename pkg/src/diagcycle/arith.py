"""Places of totally real fields, quaternion algebras by ramification, and
elementary constructions over Q.

Fields other than Q are descriptors only: a degree, its real places, and opaque
labels for whatever finite places a computation needs to name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

PLUS, MINUS = 1, -1


class ArithError(ValueError):
    pass


class ParityError(ArithError):
    """A prescription of local invariants whose product is not 1."""


@dataclass(frozen=True)
class FieldDesc:
    label: str
    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ArithError(f"field degree must be positive, got {self.degree}")

    @property
    def real_places(self) -> int:
        # totally real
        return self.degree

    def infinite_places(self) -> list[Place]:
        return [Place.real(i) for i in range(self.real_places)]

    def is_rational(self) -> bool:
        return self.degree == 1 and self.label == "Q"

    def to_json(self) -> dict:
        return {"label": self.label, "degree": self.degree}

    @classmethod
    def from_json(cls, obj: Mapping) -> FieldDesc:
        return cls(str(obj["label"]), int(obj["degree"]))


QQ = FieldDesc("Q", 1)


@dataclass(frozen=True)
class Place:
    """A real place (``index``) or a finite place (``label``)."""

    kind: str  # "real" | "finite"
    index: int = -1
    label: str = ""

    @classmethod
    def real(cls, index: int) -> Place:
        if index < 0:
            raise ArithError("real place index must be nonnegative")
        return cls("real", index=index)

    @classmethod
    def finite(cls, label) -> Place:
        return cls("finite", label=str(label))

    @classmethod
    def parse(cls, text: str) -> Place:
        text = str(text).strip()
        m = re.fullmatch(r"inf(\d+)", text)
        if m:
            return cls.real(int(m.group(1)))
        if re.fullmatch(r"\d+", text):
            return cls.finite(int(text))
        if text.startswith("v:") and len(text) > 2:
            return cls.finite(text[2:])
        raise ArithError(f"cannot parse place {text!r}")

    def sort_key(self) -> tuple:
        if self.is_real:
            return (1, self.index, "")
        p = self.prime
        return (0, p if p is not None else 0, self.label)

    def __lt__(self, other: Place) -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    @property
    def prime(self) -> int | None:
        """The rational prime for a finite place of Q, else None."""
        if self.kind == "finite" and self.label.isdigit():
            return int(self.label)
        return None

    def belongs_to(self, f: FieldDesc) -> bool:
        if self.is_real:
            return self.index < f.real_places
        if f.is_rational():
            p = self.prime
            return p is not None and is_prime(p)
        return True

    def __str__(self) -> str:
        if self.is_real:
            return f"inf{self.index}"
        return self.label if self.label.isdigit() else f"v:{self.label}"


@dataclass(frozen=True)
class QuaternionAlgebra:
    base: FieldDesc
    ramified: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "ramified", frozenset(self.ramified))
        for v in self.ramified:
            if not v.belongs_to(self.base):
                raise ArithError(f"{v} is not a place of {self.base.label}")
        if len(self.ramified) % 2:
            raise ParityError(
                f"ramification set {sorted(map(str, self.ramified))} has odd size; "
                "the product of all local invariants must be 1"
            )

    def sorted_ramified(self) -> list[Place]:
        return sorted(self.ramified)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "ramified": [str(v) for v in self.sorted_ramified()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> QuaternionAlgebra:
        return cls(FieldDesc.from_json(obj["base"]), frozenset(Place.parse(v) for v in obj["ramified"]))


def hasse_invariant(b: QuaternionAlgebra, v: Place) -> int:
    """+1 where ``b`` is a matrix algebra, -1 where it is a division algebra."""
    if not v.belongs_to(b.base):
        raise ArithError(f"{v} is not a place of {b.base.label}")
    return MINUS if v in b.ramified else PLUS


def quaternion_from_invariants(base: FieldDesc, signs: Mapping[Place, int]) -> QuaternionAlgebra:
    """The algebra with the given local invariants (unlisted places split)."""
    ram = set()
    for v, s in signs.items():
        if s not in (PLUS, MINUS):
            raise ArithError(f"invariant at {v} must be +1 or -1, got {s}")
        if s == MINUS:
            ram.add(v)
    if len(ram) % 2:
        raise ParityError(
            f"{len(ram)} places with invariant -1 ({', '.join(map(str, sorted(ram)))}); "
            "need prod_v eps_v = 1"
        )
    return QuaternionAlgebra(base, frozenset(ram))


def is_almost_definite(b: QuaternionAlgebra) -> bool:
    """Split at exactly one real place."""
    split_real = [i for i in range(b.base.real_places) if Place.real(i) not in b.ramified]
    return len(split_real) == 1


# --- elementary number theory over Q --------------------------------------

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def legendre(a: int, p: int) -> int:
    """Quadratic residue symbol (a/p) for an odd prime p, via Euler's criterion."""
    if p < 3 or p % 2 == 0:
        raise ArithError(f"legendre symbol needs an odd prime, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def splits_in_real_quadratic(d: int, p: int) -> bool:
    """Whether p splits in Q(sqrt d), for squarefree d > 1."""
    if p == 2:
        return d % 8 == 1
    return d % p != 0 and legendre(d, p) == 1


SEARCH_BOUND = 10 ** 6


def find_real_quadratic_split(primes: Iterable[int]) -> int:
    """Smallest squarefree d > 1 with Q(sqrt d) split at every given prime."""
    primes = sorted(set(primes))
    for p in primes:
        if not is_prime(p):
            raise ArithError(f"{p} is not prime")
    d = 2
    while d <= SEARCH_BOUND:
        if is_squarefree(d) and all(splits_in_real_quadratic(d, p) for p in primes):
            return d
        d += 1
    raise ArithError(f"no split real quadratic field with d <= {SEARCH_BOUND} for {primes}")


def torsion_units_totally_real(f: FieldDesc) -> frozenset[int]:
    """Roots of unity in a totally real field: only +1 and -1 embed in R."""
    return frozenset({1, -1})
