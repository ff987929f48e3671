"""Prime field arithmetic backed by dense residue tables.

All enumeration kernels index these tables with numpy arrays of residues,
so ``inv_table[a]`` and ``chi_table[a]`` work elementwise.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MAX_MODULUS = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    i = 5
    while i * i <= n:
        if n % i == 0 or n % (i + 2) == 0:
            return False
        i += 6
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    """Primes p with lo <= p <= hi."""
    return [n for n in range(max(lo, 2), hi + 1) if is_prime(n)]


class PrimeField:
    """The field F_p with precomputed inverse, square-root and character tables.

    Instances are immutable after construction and may be shared freely
    between worker threads.
    """

    __slots__ = ("p", "inv_table", "chi_table", "sqrt_table")

    def __init__(self, p: int):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p > MAX_MODULUS:
            raise ValueError(f"modulus {p} exceeds 2**20")
        r = np.arange(p, dtype=np.int64)
        # Fermat inverse a^(p-2), computed for the whole table at once.
        inv = np.ones(p, dtype=np.int64)
        base = r.copy()
        e = p - 2
        while e > 0:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        inv[0] = 0
        squares = r * r % p
        chi = np.full(p, -1, dtype=np.int64)
        chi[squares] = 1
        chi[0] = 0
        sqrt = np.full(p, -1, dtype=np.int64)
        vals, first = np.unique(squares, return_index=True)
        sqrt[vals] = r[first]  # smallest root of each square
        for name, arr in (("inv_table", inv), ("chi_table", chi), ("sqrt_table", sqrt)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("F", self.p))

    # Scalar interface shared with RationalField (used by the maps module).

    def reduce(self, a) -> int:
        if isinstance(a, Fraction):
            return self.reduce(a.numerator) * self.inv(self.reduce(a.denominator)) % self.p
        return int(a) % self.p

    def inv(self, a) -> int:
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse mod {self.p}")
        return int(self.inv_table[a])

    def is_zero(self, a) -> bool:
        return int(a) % self.p == 0

    def sqrt(self, a) -> int | None:
        r = int(self.sqrt_table[int(a) % self.p])
        return None if r < 0 else r


def field_new(p: int) -> PrimeField:
    return PrimeField(p)


def legendre(fld: PrimeField, a: int) -> int:
    """Quadratic character of ``a`` in F_p: +1, -1, or 0."""
    if not 0 <= a < fld.p:
        raise ValueError(f"residue {a} out of range for p={fld.p}")
    return int(fld.chi_table[a])


class RationalField:
    """Exact arithmetic over Q with the same scalar interface as PrimeField."""

    p = 0

    def reduce(self, a) -> Fraction:
        return Fraction(a)

    def inv(self, a) -> Fraction:
        a = Fraction(a)
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in Q")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def __repr__(self) -> str:
        return "RationalField()"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("Q")


QQ = RationalField()
