"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis 1, z, ..., z^(phi(n)-1), reduced modulo
the n-th cyclotomic polynomial, as integer coordinates over one positive common
denominator in lowest terms.  Equal elements therefore have identical
representations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Union

Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num[: len(den) - 1]), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, constant term first."""
    if n < 1:
        raise ValueError(f"cyclotomic modulus must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Integer coordinates of z^k for 0 <= k < max(n, 2 phi(n)); Phi_n is monic."""
    phi = euler_phi(n)
    cyc = cyclotomic_poly(n)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(max(n, 2 * phi)):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * cyc[j]
    return tuple(rows)


def _normalize(num, den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num, den = [-a for a in num], -den
    g = gcd(den, *num)
    if g > 1:
        num = [a // g for a in num]
        den //= g
    return tuple(num), den


def _reduce_int(n: int, poly) -> list[int]:
    """Power-basis coordinates of sum(poly[k] z^k) for integer poly."""
    table = _power_table(n)
    out = [0] * euler_phi(n)
    for k, a in enumerate(poly):
        if a:
            for j, t in enumerate(table[k % n]):
                if t:
                    out[j] += a * t
    return out


def _lcm_of_denominators(fracs) -> int:
    den = 1
    for c in fracs:
        den = den * c.denominator // gcd(den, c.denominator)
    return den


class CycloElt:
    """An element of Q(zeta_n).  Immutable."""

    __slots__ = ("_n", "_num", "_den", "_hash")

    def __init__(self, modulus: int, coeffs) -> None:
        if modulus < 1:
            raise ValueError(f"cyclotomic modulus must be positive, got {modulus}")
        coeffs = [Fraction(c) for c in coeffs]
        phi = euler_phi(modulus)
        if len(coeffs) != phi:
            raise ValueError(f"expected {phi} coordinates for modulus {modulus}, got {len(coeffs)}")
        den = _lcm_of_denominators(coeffs)
        self._n = modulus
        self._num, self._den = _normalize([int(c * den) for c in coeffs], den)
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def _raw(cls, modulus: int, num, den: int = 1) -> CycloElt:
        obj = cls.__new__(cls)
        obj._n = modulus
        obj._num, obj._den = _normalize(num, den)
        obj._hash = None
        return obj

    @classmethod
    def from_rational(cls, n: int, value: Scalar) -> CycloElt:
        value = Fraction(value)
        num = [0] * euler_phi(n)
        num[0] = value.numerator
        return cls._raw(n, num, value.denominator)

    @classmethod
    def zero(cls, n: int) -> CycloElt:
        return cls.from_rational(n, 0)

    @classmethod
    def one(cls, n: int) -> CycloElt:
        return cls.from_rational(n, 1)

    @classmethod
    def from_poly(cls, n: int, poly) -> CycloElt:
        """Reduce sum(poly[k] * z^k) into the power basis; any length allowed."""
        fracs = [Fraction(a) for a in poly]
        den = _lcm_of_denominators(fracs)
        return cls._raw(n, _reduce_int(n, [int(a * den) for a in fracs]), den)

    # accessors ----------------------------------------------------------

    @property
    def modulus(self) -> int:
        return self._n

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self._den) for a in self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def rational_part(self) -> Fraction | None:
        """The value as a rational number, or None if the element is irrational."""
        if any(self._num[1:]):
            return None
        return Fraction(self._num[0], self._den)

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> CycloElt:
        if isinstance(other, CycloElt):
            if other._n != self._n:
                raise ValueError(
                    f"modulus mismatch: {self._n} vs {other._n}; lift with embed() first"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElt.from_rational(self._n, other)
        return NotImplemented

    def __add__(self, other) -> CycloElt:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d, e = self._den, other._den
        if d == e:
            return CycloElt._raw(self._n, [a + b for a, b in zip(self._num, other._num)], d)
        return CycloElt._raw(self._n, [a * e + b * d for a, b in zip(self._num, other._num)], d * e)

    __radd__ = __add__

    def __neg__(self) -> CycloElt:
        return CycloElt._raw(self._n, [-a for a in self._num], self._den)

    def __sub__(self, other) -> CycloElt:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> CycloElt:
        return -self + other

    def __mul__(self, other) -> CycloElt:
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycloElt._raw(
                self._n, [a * other.numerator for a in self._num], self._den * other.denominator
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        x, y = self._num, other._num
        phi = len(x)
        prod = [0] * (2 * phi - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        prod[i + j] += a * b
        out = prod[:phi]
        table = _power_table(self._n)
        for k in range(phi, 2 * phi - 1):
            c = prod[k]
            if c:
                for j, t in enumerate(table[k]):
                    if t:
                        out[j] += c * t
        return CycloElt._raw(self._n, out, self._den * other._den)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> CycloElt:
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = CycloElt.one(self._n)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __truediv__(self, other: Scalar) -> CycloElt:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        other = Fraction(other)
        if not other:
            raise ZeroDivisionError("division of a cyclotomic element by zero")
        return CycloElt._raw(
            self._n, [a * other.denominator for a in self._num], self._den * other.numerator
        )

    def conjugate(self) -> CycloElt:
        """Complex conjugation, z -> z^-1."""
        n = self._n
        poly = [0] * n
        for k, a in enumerate(self._num):
            poly[(-k) % n] += a
        return CycloElt._raw(n, _reduce_int(n, poly), self._den)

    # comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloElt):
            return self._n == other._n and self._den == other._den and self._num == other._num
        if isinstance(other, (int, Fraction)):
            return self.rational_part() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, self._num, self._den))
        return self._hash

    def __repr__(self) -> str:
        terms = []
        for k, a in enumerate(self.coeffs):
            if a:
                terms.append(str(a) if k == 0 else f"{a}*z^{k}")
        return f"CycloElt({self._n}: {' + '.join(terms) or '0'})"


def zeta(n: int, k: int = 1) -> CycloElt:
    """The class of zeta_n^k."""
    if n < 1:
        raise ValueError(f"cyclotomic modulus must be positive, got {n}")
    return CycloElt._raw(n, _power_table(n)[k % n])


def embed(a: CycloElt, m: int) -> CycloElt:
    """Express ``a`` in Q(zeta_m); requires a.modulus | m."""
    n = a.modulus
    if m < 1 or m % n:
        raise ValueError(f"cannot embed Q(zeta_{n}) into Q(zeta_{m})")
    step = m // n
    poly = [0] * m
    for k, c in enumerate(a._num):
        poly[k * step] = c
    return CycloElt.from_poly(m, poly) / a._den


def rational_part(a: CycloElt) -> Fraction | None:
    return a.rational_part()
