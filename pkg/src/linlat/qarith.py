"""Exact q-analog arithmetic and the closed-form bounds built from it.

Everything here is pure integer / Fraction arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, prod
from typing import NamedTuple

from .errors import OutOfRange


class ExactBound(NamedTuple):
    exact: Fraction
    floor: int


def q_bracket(n: int, q: int) -> int:
    """[n]_q = 1 + q + ... + q^(n-1)."""
    if n < 0:
        raise OutOfRange(f"n must be >= 0, got {n}")
    if q < 2:
        raise OutOfRange(f"q must be >= 2, got {q}")
    return (q ** n - 1) // (q - 1)


def q_factorial(n: int, q: int) -> int:
    return prod(q_bracket(i, q) for i in range(1, n + 1))


def q_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of GF(q)^n."""
    if n < 0 or k < 0 or k > n:
        raise OutOfRange(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    num = prod(q ** (n - i) - 1 for i in range(k))
    den = prod(q ** (k - i) - 1 for i in range(k))
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def q_binomial_total(n: int, k: int, q: int) -> int:
    """Like q_binomial but 0 outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return q_binomial(n, k, q)


def largest_levels(n: int, k: int, q: int) -> list[int]:
    """Dimensions of the k largest levels; ties go to the index nearest n/2, then the smaller one."""
    if not 1 <= k <= n + 1:
        raise OutOfRange(f"need 1 <= k <= n+1, got k={k}, n={n}")
    order = sorted(range(n + 1), key=lambda i: (-q_binomial(n, i, q), abs(2 * i - n), i))
    return sorted(order[:k])


def sigma_q(n: int, k: int, q: int) -> int:
    """Sum of the k largest Gaussian binomials [n choose i]_q."""
    return sum(q_binomial(n, i, q) for i in largest_levels(n, k, q))


def ordered_bases_count(n: int, q: int) -> int:
    """|GL(n, q)| = (q^n - 1)(q^n - q)...(q^n - q^(n-1))."""
    return prod(q ** n - q ** i for i in range(n))


def _exact(value: Fraction) -> ExactBound:
    return ExactBound(value, floor(value))


def bn_bound(P, n: int, q: int) -> ExactBound:
    """((|P| + h(P)) / 2 - 1) * [n choose floor(n/2)]_q."""
    factor = Fraction(P.size + P.height, 2) - 1
    return _exact(factor * q_binomial(n, n // 2, q))


def gm_factor(P, k: int) -> Fraction:
    if k < 2:
        raise OutOfRange(f"k must be >= 2, got {k}")
    return Fraction(P.size + (3 * k - 5) * 2 ** (k - 2) * (P.height - 1) - 1, 2 ** (k - 1))


def gm_bound(P, n: int, q: int, k: int) -> ExactBound:
    """(1/2^(k-1)) (|P| + (3k-5) 2^(k-2) (h(P)-1) - 1) * [n choose floor(n/2)]_q."""
    return _exact(gm_factor(P, k) * q_binomial(n, n // 2, q))


def interval_chain_alpha(P, k: int) -> Fraction:
    """Closed-form alpha for a k-interval chain: k/2^(k-1) (|P| + (3k-5) 2^(k-2) (h-1) - 1)."""
    return k * gm_factor(P, k)


# -- conditions on (q, k, l) for the two-level projective plane bound ----------

def plane_bound_condition(q: int, k: int, l: int) -> bool:
    """q^2+q+1 < (q+3-l)(q+1-l) + (q+3-k)(q+1-k) + 2."""
    return q * q + q + 1 < (q + 3 - l) * (q + 1 - l) + (q + 3 - k) * (q + 1 - k) + 2


def plane_structure_condition(q: int, k: int, l: int) -> bool:
    """q^2+q+1 < (q+2-l)(q+1-l) + (q+2-k)(q+1-k) + 2."""
    return q * q + q + 1 < (q + 2 - l) * (q + 1 - l) + (q + 2 - k) * (q + 1 - k) + 2


def odd_theorem_hypothesis(q: int, k: int, l: int) -> bool:
    """k, l <= (1 - sqrt(2)/2) q, decided exactly: 2(q - x)^2 >= q^2 with x <= q."""
    return all(0 <= x <= q and 2 * (q - x) ** 2 >= q * q for x in (k, l))


def weak_hall_ratio(n: int, q: int, s: int, l: int) -> tuple[Fraction, Fraction]:
    """Both ends of the Hall ratio chain for the weak pushdown at level s.

    Returns (([s]_q - l + 1) / [n-s+1]_q, (q^(n/2) + q - 2) / (q^(n/2) - 1)); the
    second value is the instance-free end of the chain and is only meaningful for n even.
    """
    first = Fraction(q_bracket(s, q) - l + 1, q_bracket(n - s + 1, q))
    half = n // 2
    last = Fraction(q ** half + q - 2, q ** half - 1) if half else Fraction(0)
    return first, last


def induced_hall_ratio(n: int, q: int, s: int, l: int) -> tuple[Fraction, Fraction]:
    """(([s]_q - (l-1)[s-1]_q) / [n-s+1]_q, (q^(s-1) + q - 2) / (q^(n-s+1) - 1))."""
    first = Fraction(q_bracket(s, q) - (l - 1) * q_bracket(s - 1, q), q_bracket(n - s + 1, q))
    den = q ** (n - s + 1) - 1
    second = Fraction(q ** (s - 1) + q - 2, den) if den else Fraction(0)
    return first, second


def chain_identity_sides(n: int, q: int) -> tuple[int, int]:
    """Left and right sides of the chain double-count identity for odd n >= 3."""
    if n < 3 or n % 2 == 0:
        raise OutOfRange(f"n must be odd and >= 3, got {n}")
    lo, hi = (n - 3) // 2, (n + 3) // 2
    left = (
        q_binomial(n, hi, q)
        * q_binomial(hi, lo, q)
        * q_factorial(lo, q) ** 2
        * (q * q + q + 1)
        * (q + 1)
    )
    return left, q_factorial(n, q)
