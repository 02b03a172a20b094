"""Finite field arithmetic for small prime powers (q <= 16).

Elements of GF(p^e) are encoded as integers ``a = sum(a_i * p**i)`` where
``a_i`` are the coefficients of a polynomial over GF(p) reduced modulo a fixed
monic irreducible of degree e.  For e = 1 this is ordinary arithmetic mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Tuple

from .errors import NotAPrimePower, UnsupportedOrder

MAX_ORDER = 16

Table = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class FieldSpec:
    q: int
    p: int
    e: int
    add_table: Table
    mul_table: Table
    inv_table: Tuple[int, ...]  # inv_table[0] is 0 by convention
    neg_table: Tuple[int, ...]
    modulus: Tuple[int, ...] = ()  # low-to-high coefficients, monic; () for prime fields

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.inv_table[a]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def pow(self, a: int, k: int) -> int:
        r = 1
        for _ in range(k):
            r = self.mul_table[r][a]
        return r

    @property
    def elements(self) -> range:
        return range(self.q)

    def __repr__(self) -> str:
        return f"FieldSpec(q={self.q})"


def factor_prime_power(q: int) -> Tuple[int, int]:
    """Return (p, e) with q == p**e, or raise NotAPrimePower."""
    if not isinstance(q, int) or q < 2:
        raise NotAPrimePower(f"{q!r} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, m = 0, q
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise NotAPrimePower(f"{q} is not a prime power")
    return p, e


# -- polynomials over GF(p), coefficient lists low-to-high ---------------------

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list, m: list, p: int) -> list:
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def is_irreducible(poly: Tuple[int, ...], p: int) -> bool:
    """Irreducibility over GF(p) by trial division with monic polys of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(list(poly), list(low) + [1], p):
                return False
    return True


def lowest_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """Lowest monic irreducible of degree e, ordering by sum(c_i p^i) over the non-leading part."""
    for value in range(p ** e):
        low = [(value // p ** i) % p for i in range(e)]
        poly = tuple(low) + (1,)
        if is_irreducible(poly, p):
            return poly
    raise AssertionError(f"no irreducible of degree {e} over GF({p})")


def _to_digits(a: int, p: int, e: int) -> list:
    return [(a // p ** i) % p for i in range(e)]


def _from_digits(d: list, p: int) -> int:
    return sum(c * p ** i for i, c in enumerate(d))


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Build GF(q) with total operation tables.  Cached, so equal q gives the same object."""
    p, e = factor_prime_power(q)
    if q > MAX_ORDER:
        raise UnsupportedOrder(f"q = {q} exceeds the supported maximum {MAX_ORDER}")
    if e == 1:
        add = tuple(tuple((a + b) % p for b in range(q)) for a in range(q))
        mul = tuple(tuple((a * b) % p for b in range(q)) for a in range(q))
        modulus: Tuple[int, ...] = ()
    else:
        modulus = lowest_irreducible(p, e)
        digits = [_to_digits(a, p, e) for a in range(q)]
        add = tuple(
            tuple(_from_digits([(x + y) % p for x, y in zip(digits[a], digits[b])], p) for b in range(q))
            for a in range(q)
        )
        rows = []
        for a in range(q):
            row = []
            for b in range(q):
                prod = [0] * (2 * e - 1)
                for i, x in enumerate(digits[a]):
                    for j, y in enumerate(digits[b]):
                        prod[i + j] = (prod[i + j] + x * y) % p
                red = _poly_mod(prod, list(modulus), p)
                row.append(_from_digits(red, p))
            rows.append(tuple(row))
        mul = tuple(rows)
    inv = [0] * q
    for a in range(1, q):
        inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
    neg = [next(b for b in range(q) if add[a][b] == 0) for a in range(q)]
    return FieldSpec(q, p, e, add, mul, tuple(inv), tuple(neg), modulus)


def field_axiom_check(f: FieldSpec) -> bool:
    """Exhaustively check the field axioms on f's tables."""
    q = f.q
    A, M = f.add_table, f.mul_table
    try:
        if len(A) != q or len(M) != q or any(len(r) != q for r in A + M):
            return False
        if q < 2:
            return False
        for a in range(q):
            if A[a][0] != a or M[a][1] != a or M[a][0] != 0:
                return False
            if not any(A[a][b] == 0 for b in range(q)):
                return False
            if a and M[a][f.inv_table[a]] != 1:
                return False
            for b in range(q):
                if A[a][b] != A[b][a] or M[a][b] != M[b][a]:
                    return False
                if not (0 <= A[a][b] < q and 0 <= M[a][b] < q):
                    return False
                for c in range(q):
                    if A[A[a][b]][c] != A[a][A[b][c]]:
                        return False
                    if M[M[a][b]][c] != M[a][M[b][c]]:
                        return False
                    if M[a][A[b][c]] != A[M[a][b]][M[a][c]]:
                        return False
    except (IndexError, TypeError):
        return False
    return True
