"""Small finite fields GF(p^e) in polynomial representation.

Elements are coefficient tuples ``(c_0, ..., c_{e-1})`` of a polynomial of
degree below ``e``. The field is enumerated by reading those coefficients as
little-endian base-``p`` digits, which gives every element an integer code in
``0..q-1``; the lookup tables returned by :meth:`FieldSpec.tables` work on those codes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """``(p, e)`` with ``q = p**e`` for a prime ``p``, else ``None``."""
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


# polynomials over GF(p) as little-endian coefficient lists, trimmed of trailing zeros

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _polymod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _trim(a)
    return a


def _monic_polys(p: int, deg: int):
    """Monic polynomials of degree ``deg``, lower coefficients counted little-endian."""
    for low in itertools.product(range(p), repeat=deg):
        yield list(low[::-1]) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree ``1..deg // 2``."""
    deg = len(_trim(list(poly))) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not _polymod(poly, f, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) with a monic irreducible modulus (coefficients little-endian, length ``e+1``)."""

    p: int
    e: int
    modulus: tuple[int, ...]
    _tables: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.e < 1:
            raise ValueError("need a prime p and e >= 1")
        if len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree e")
        if not is_irreducible(list(self.modulus), self.p):
            raise ValueError("modulus is reducible")

    @classmethod
    def of_order(cls, q: int) -> "FieldSpec":
        pe = prime_power(q)
        if pe is None:
            raise ValueError(f"{q} is not a prime power")
        p, e = pe
        for poly in _monic_polys(p, e):
            if is_irreducible(poly, p):
                return cls(p, e, tuple(poly))
        raise AssertionError("an irreducible polynomial always exists")

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __str__(self) -> str:
        return f"GF({self.p}^{self.e}) mod {list(self.modulus)}"

    def element(self, code: int) -> "FieldElement":
        """The ``code``-th element in enumeration order."""
        if not 0 <= code < self.q:
            raise ValueError("element code out of range")
        coeffs = []
        for _ in range(self.e):
            code, c = divmod(code, self.p)
            coeffs.append(c)
        return FieldElement(self, tuple(coeffs))

    def elements(self) -> list["FieldElement"]:
        return [self.element(i) for i in range(self.q)]

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    def add(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._own(a, b)
        return FieldElement(self, tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: "FieldElement") -> "FieldElement":
        self._own(a)
        return FieldElement(self, tuple(-x % self.p for x in a.coeffs))

    def sub(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        return self.add(a, self.neg(b))

    def mul(self, a: "FieldElement", b: "FieldElement") -> "FieldElement":
        self._own(a, b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        rem = _polymod(prod, list(self.modulus), self.p)
        return FieldElement(self, tuple(rem + [0] * (self.e - len(rem))))

    def inverse(self, a: "FieldElement") -> "FieldElement":
        if a.code == 0:
            raise ZeroDivisionError("zero has no inverse")
        # a^(q-2) by square and multiply
        result, base, k = self.one, a, self.q - 2
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def _own(self, *xs: "FieldElement") -> None:
        for x in xs:
            if x.spec != self:
                raise ValueError(f"element of {x.spec} used in {self}")

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(add, mul)`` lookup tables indexed by element codes."""
        if "t" not in self._tables:
            els = self.elements()
            add = np.array([[self.add(a, b).code for b in els] for a in els], dtype=np.int64)
            mul = np.array([[self.mul(a, b).code for b in els] for a in els], dtype=np.int64)
            self._tables["t"] = (add, mul)
        return self._tables["t"]


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.e or any(not 0 <= c < self.spec.p for c in self.coeffs):
            raise ValueError("coefficients out of range")

    @cached_property
    def code(self) -> int:
        return sum(c * self.spec.p ** i for i, c in enumerate(self.coeffs))

    def __add__(self, other): return self.spec.add(self, other)
    def __sub__(self, other): return self.spec.sub(self, other)
    def __mul__(self, other): return self.spec.mul(self, other)
    def __neg__(self): return self.spec.neg(self)
    def __truediv__(self, other): return self.spec.mul(self, self.spec.inverse(other))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        terms = [f"{c}" if i == 0 else f"{c}x^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


def smallest_prime_power_at_least(m: int) -> FieldSpec:
    """Field of the least prime-power order ``q >= m``."""
    if m < 2:
        raise ValueError("m must be at least 2")
    q = m
    while prime_power(q) is None:
        q += 1
    return FieldSpec.of_order(q)
