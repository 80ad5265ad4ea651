"""Arithmetic in the binary extension fields GF(2^p), 1 <= p <= 8.

Elements are plain integers in ``[0, q)`` whose bits are the coefficients of
the polynomial representation (bit ``i`` is the coefficient of ``x^i``).
Multiplication goes through exp/log tables built from a fixed primitive
polynomial per extension degree, so codes written to disk are reproducible.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

#: Fixed primitive polynomials (bitmask, bit i = coefficient of x^i).
PRIMITIVE_POLYS = {
    1: 0b11,  # x + 1
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class Field:
    """The finite field GF(2^p).

    Parameters
    ----------
    p : int
        Extension degree, ``1 <= p <= 8``.
    primitive_poly : int, optional
        Bitmask of a degree-``p`` primitive polynomial. Defaults to the
        entry of :data:`PRIMITIVE_POLYS`.

    Attributes
    ----------
    exp_table : ndarray, shape (q - 1,)
        ``exp_table[i] = alpha**i``.
    log_table : ndarray, shape (q,)
        Inverse of ``exp_table`` on nonzero elements; ``log_table[0]`` is -1.
    mul_table : ndarray, shape (q, q)
        Full multiplication table, used by the vectorized kernels.
    inv_table : ndarray, shape (q,)
        Multiplicative inverses; ``inv_table[0]`` is 0 and never valid.
    """

    def __init__(self, p: int, primitive_poly: int | None = None):
        if not 1 <= p <= 8:
            raise ValueError(f"extension degree must be in 1..8, got {p}")
        poly = PRIMITIVE_POLYS[p] if primitive_poly is None else int(primitive_poly)
        if poly >> p != 1:
            raise ValueError(f"polynomial {poly:#b} does not have degree {p}")
        self.p = p
        self.q = 1 << p
        self.primitive_poly = poly

        q = self.q
        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        for i in range(q - 1):
            if log[x] != -1:
                raise ValueError(f"polynomial {poly:#b} is not primitive")
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & q:
                x ^= poly
        if x != 1:
            raise ValueError(f"polynomial {poly:#b} is not primitive")
        self.exp_table = exp
        self.log_table = log

        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        self.mul_table = mul
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[nz]) % (q - 1)]
        self.inv_table = inv
        for arr in (exp, log, mul, inv):
            arr.flags.writeable = False

    def __repr__(self) -> str:
        return f"Field(p={self.p}, primitive_poly={self.primitive_poly:#b})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and self.p == other.p
            and self.primitive_poly == other.primitive_poly
        )

    def __hash__(self) -> int:
        return hash((self.p, self.primitive_poly))

    @property
    def alpha(self) -> int:
        """The primitive element (the class of ``x``; equals 1 for GF(2))."""
        return int(self.exp_table[1 % (self.q - 1)])

    def _check(self, *elems: int) -> None:
        for e in elems:
            if not 0 <= e < self.q:
                raise ValueError(f"{e} is not an element of GF({self.q})")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if a == 0:
            return 1 if e == 0 else 0
        return int(self.exp_table[(int(self.log_table[a]) * e) % (self.q - 1)])

    def bits_to_element(self, bits: Sequence[int]) -> int:
        """Pack ``p`` bits, MSB first (``bits[j]`` is the coefficient of x^(p-1-j))."""
        if len(bits) != self.p:
            raise ValueError(f"expected {self.p} bits, got {len(bits)}")
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit values must be 0 or 1, got {b}")
            value = (value << 1) | int(b)
        return value

    def element_to_bits(self, e: int) -> list[int]:
        self._check(e)
        return [(e >> (self.p - 1 - j)) & 1 for j in range(self.p)]


@lru_cache(maxsize=None)
def field_new(p: int) -> Field:
    """Return the (cached) field GF(2^p) with its standard primitive polynomial."""
    return Field(p)


def field_of_order(q: int) -> Field:
    p = int(q).bit_length() - 1
    if q < 2 or 1 << p != q:
        raise ValueError(f"field order must be a power of two, got {q}")
    return field_new(p)
