"""Arithmetic in GF(2^h) for 1 <= h <= 5.

Elements are plain Python ints: the bit value of a polynomial over GF(2),
so 0b110 stands for x^2 + x.  Addition is XOR.  Multiplication is carried
out modulo a fixed irreducible polynomial per degree and cached in a full
q x q table (q <= 32, so at most 1024 entries).  The fixed moduli are

    h=1: x           (0b10)
    h=2: x^2+x+1     (0b111)
    h=3: x^3+x+1     (0b1011)
    h=4: x^4+x+1     (0b10011)
    h=5: x^5+x^2+1   (0b100101)

All derived maps (inverse, square, square root, trace, Frobenius) are
tables as well.  The squaring map is a field automorphism in
characteristic 2, so square roots are exact: sqrt(a) = a^(2^(h-1)).

A thin FieldElement wrapper is provided for code that wants operator
syntax and protection against mixing elements of different fields; the
geometry internals work on raw ints and numpy uint8 arrays for speed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional

import numpy as np

_FIXED_MODULI = {1: 0b10, 2: 0b111, 3: 0b1011, 4: 0b10011, 5: 0b100101}


def _poly_degree(p: int) -> int:
    return p.bit_length() - 1


def _poly_divmod(a: int, b: int) -> tuple[int, int]:
    """Quotient and remainder of binary polynomials given as bit values."""
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = _poly_degree(b)
    while a.bit_length() - 1 >= db and a:
        shift = a.bit_length() - 1 - db
        q ^= 1 << shift
        a ^= b << shift
    return q, a


def _poly_mul_mod(a: int, b: int, modulus: int, h: int) -> int:
    r = 0
    top = 1 << h
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= modulus
    return r


def _is_irreducible(modulus: int, h: int) -> bool:
    """Root/factor search; enough for degrees up to 5.

    A reducible polynomial of degree <= 5 has a linear factor or (for
    degrees 4 and 5) the factor x^2+x+1, the only irreducible quadratic
    over GF(2).
    """
    if _poly_degree(modulus) != h:
        return False
    if h == 1:
        return True
    if not modulus & 1:  # root at 0
        return False
    if bin(modulus).count("1") % 2 == 0:  # root at 1
        return False
    if h >= 4 and _poly_divmod(modulus, 0b111)[1] == 0:
        return False
    return True


class GF:
    """GF(2^h) with table-driven arithmetic on int-valued elements."""

    def __init__(self, h: int, modulus: Optional[int] = None):
        if h not in _FIXED_MODULI:
            raise ValueError(f"h must be in 1..5, got {h}")
        if modulus is None:
            modulus = _FIXED_MODULI[h]
        if not _is_irreducible(modulus, h):
            raise ValueError(f"modulus {bin(modulus)} is not irreducible of degree {h}")
        self.h = h
        self.modulus = modulus
        self.q = 1 << h
        q = self.q

        mul = [[_poly_mul_mod(a, b, modulus, h) for b in range(q)] for a in range(q)]
        self._mul = mul
        self.mul_table = np.array(mul, dtype=np.uint8)

        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
        self._inv = inv
        self.inv_table = np.array(inv, dtype=np.uint8)

        sq = [mul[a][a] for a in range(q)]
        sqrt = [0] * q
        for a in range(q):
            sqrt[sq[a]] = a
        self._sq, self._sqrt = sq, sqrt
        self.sq_table = np.array(sq, dtype=np.uint8)
        self.sqrt_table = np.array(sqrt, dtype=np.uint8)

        tr = []
        for a in range(q):
            t, acc = a, a
            for _ in range(h - 1):
                acc = sq[acc]
                t ^= acc
            tr.append(t)
        if any(t not in (0, 1) for t in tr):
            raise AssertionError("trace landed outside the prime field")
        self._trace = tr
        self.trace_table = np.array(tr, dtype=np.uint8)

    # -- scalar operations (ints in, ints out) --------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self._mul[a][self.inv(b)]

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        k %= self.q - 1 if self.q > 2 else 1
        r, base = 1, a
        while k:
            if k & 1:
                r = self._mul[r][base]
            base = self._mul[base][base]
            k >>= 1
        return r

    def trace(self, a: int) -> int:
        return self._trace[a]

    def sqrt(self, a: int) -> int:
        return self._sqrt[a]

    def frobenius(self, a: int, k: int) -> int:
        """a^(2^k); k is reduced mod h, so frobenius(a, h) == a."""
        for _ in range(k % self.h):
            a = self._sq[a]
        return a

    def artin_schreier_root(self, delta: int) -> Optional[int]:
        """Smallest b with b^2 + b = delta, or None when trace(delta) = 1."""
        for b in range(self.q):
            if self._sq[b] ^ b == delta:
                return b
        return None

    def pick_delta_trace_one(self) -> int:
        """Smallest bit value with absolute trace 1."""
        for a in range(self.q):
            if self._trace[a] == 1:
                return a
        raise AssertionError("no trace-one element")  # unreachable: trace is onto

    def pick_omega_irreducible(self) -> int:
        """Smallest nonzero w such that X^2 + wX + 1 has no root, by brute evaluation."""
        for w in range(1, self.q):
            if all(self._sq[x] ^ self._mul[w][x] ^ 1 != 0 for x in range(self.q)):
                return w
        raise AssertionError("no irreducible X^2+wX+1")  # unreachable for q even

    # -- housekeeping ----------------------------------------------------------

    def elements(self) -> Iterator[int]:
        return iter(range(self.q))

    def element(self, bits: int) -> "FieldElement":
        return FieldElement(self, bits)

    def from_hex(self, s: str) -> "FieldElement":
        return FieldElement(self, int(s, 16))

    def to_json(self) -> dict:
        return {"h": self.h, "modulus": self.modulus}

    @staticmethod
    def from_json(obj: dict) -> "GF":
        return GF(int(obj["h"]), int(obj["modulus"]))

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.h, self.modulus) == (other.h, other.modulus)

    def __hash__(self) -> int:
        return hash((self.h, self.modulus))

    def __repr__(self) -> str:
        return f"GF(2^{self.h}, mod={bin(self.modulus)})"


@lru_cache(maxsize=None)
def field_for_h(h: int) -> GF:
    """The GF(2^h) with the fixed modulus, cached so tables build once."""
    return GF(h)


def field_for_q(q: int) -> GF:
    h = q.bit_length() - 1
    if 1 << h != q:
        raise ValueError(f"q must be a power of 2, got {q}")
    return field_for_h(h)


@dataclass(frozen=True)
class FieldElement:
    """Operator-friendly wrapper around an int element of a specific GF."""

    field: GF
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < self.field.q:
            raise ValueError(f"bits {self.bits} outside GF(2^{self.field.h})")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise ValueError("elements from different fields cannot mix")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.bits ^ other.bits)

    __sub__ = __add__  # characteristic 2

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.bits, other.bits))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.div(self.bits, other.bits))

    def __pow__(self, k: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.bits, k))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.bits))

    def trace(self) -> int:
        return self.field.trace(self.bits)

    def sqrt(self) -> "FieldElement":
        return FieldElement(self.field, self.field.sqrt(self.bits))

    def frobenius(self, k: int) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius(self.bits, k))

    def hex(self) -> str:
        return format(self.bits, "x")

    def __bool__(self) -> bool:
        return self.bits != 0

    def __repr__(self) -> str:
        return f"<{self.hex()} in GF(2^{self.field.h})>"


def elements_to_hex(coords) -> List[str]:
    return [format(int(c), "x") for c in coords]


def hex_to_elements(strs) -> tuple:
    return tuple(int(s, 16) for s in strs)
