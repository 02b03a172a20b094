"""Simple (basis-spanned) families, chain structures and the LYM-type double count.

A simple family is stored as distinct subsets of {0..n-1} (bitmasks); the
subspace spanned by the matching standard basis vectors is only produced when
a lattice Family is needed.  Set inclusion is the order, so a SimpleFamily is
an order context for the search engine and alpha(H, P) is an ordinary search.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Iterator, Optional, Sequence

from .errors import AmbientMismatch, BudgetExceeded, NotFree, OutOfRange, TooLarge
from .families import Family
from .lattice import LinearLattice, build_lattice, general_linear_group, bits
from .posets import PosetSpec, is_free
from .qarith import chain_identity_sides, interval_chain_alpha, q_binomial, q_factorial


def _set_key(s: int) -> tuple[int, tuple[int, ...]]:
    return (s.bit_count(), tuple(bits(s)))


class SimpleFamily:
    """Distinct subsets of {0, ..., n-1} ordered by inclusion."""

    def __init__(self, n: int, sets: Iterable[int | Iterable[int]]):
        if n < 0:
            raise OutOfRange("n must be non-negative")
        masks = set()
        for s in sets:
            if not isinstance(s, int):
                m = 0
                for j in s:
                    if not 0 <= j < n:
                        raise OutOfRange(f"basis index {j} outside 0..{n - 1}")
                    m |= 1 << j
                s = m
            if s < 0 or s >> n:
                raise OutOfRange(f"set {s:b} is not a subset of {{0..{n - 1}}}")
            masks.add(s)
        self.n = n
        self.sets: tuple[int, ...] = tuple(sorted(masks, key=_set_key))
        self.rank = tuple(s.bit_count() for s in self.sets)
        up = [0] * len(self.sets)
        down = [0] * len(self.sets)
        for i, a in enumerate(self.sets):
            for j, b in enumerate(self.sets):
                if i != j and a & ~b == 0:
                    up[i] |= 1 << j
                    down[j] |= 1 << i
        self.up_strict = up
        self.down_strict = down

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sets)

    def __repr__(self) -> str:
        return f"SimpleFamily(n={self.n}, size={len(self)})"

    def N(self, i: int) -> int:
        return sum(1 for r in self.rank if r == i)

    def level_counts(self) -> list[int]:
        c = Counter(self.rank)
        return [c.get(i, 0) for i in range(self.n + 1)]

    def as_lists(self) -> list[list[int]]:
        return [list(bits(s)) for s in self.sets]

    def to_family(self, L: LinearLattice) -> Family:
        """Spans of the standard basis vectors named by each set."""
        if L.n != self.n:
            raise AmbientMismatch(f"simple family over n={self.n}, lattice over n={L.n}")
        idx = []
        for s in self.sets:
            if s == 0:
                idx.append(0)
                continue
            rows = [[1 if j == i else 0 for j in range(self.n)] for i in bits(s)]
            idx.append(L.index_of_rows(rows))
        return Family.from_indices(L, idx)


@dataclass(frozen=True)
class ChainStructure:
    kind: str
    n: int
    k: int
    realized: SimpleFamily


def _prefix(i: int) -> int:
    return (1 << i) - 1


def maximal_chain(n: int) -> ChainStructure:
    return ChainStructure("maximal-chain", n, 1, SimpleFamily(n, [_prefix(i) for i in range(n + 1)]))


def interval_chain(n: int, k: int) -> ChainStructure:
    """Union of the intervals [A_i, A_(i+k)] along the chain A_i = {0..i-1}."""
    if not 1 <= k <= n:
        raise OutOfRange(f"need 1 <= k <= n, got k={k}, n={n}")
    sets = set()
    for i in range(n - k + 1):
        base, free = _prefix(i), _prefix(i + k) & ~_prefix(i)
        sub = free
        while True:
            sets.add(base | sub)
            if sub == 0:
                break
            sub = (sub - 1) & free
    kind = "double-chain" if k == 2 else "k-interval-chain"
    return ChainStructure(kind, n, k, SimpleFamily(n, sets))


def double_chain(n: int) -> ChainStructure:
    return interval_chain(n, 2)


def cyclic_interval(n: int) -> ChainStructure:
    """Cyclic arcs of lengths 1..n-1 of the basis arranged around a circle."""
    if n < 2:
        raise OutOfRange("the cyclic interval family needs n >= 2")
    sets = []
    for length in range(1, n):
        for start in range(n):
            m = 0
            for j in range(length):
                m |= 1 << ((start + j) % n)
            sets.append(m)
    return ChainStructure("cyclic-interval", n, 1, SimpleFamily(n, sets))


# -- alpha ---------------------------------------------------------------------

def alpha(
    H: SimpleFamily,
    forbidden: Sequence[PosetSpec],
    induced: bool = False,
    node_limit: Optional[int] = None,
) -> int:
    """Largest subfamily of H containing no member of ``forbidden``."""
    from .search import SearchProblem, solve

    forbidden = tuple(forbidden)
    if any(P.m == 1 for P in forbidden):
        return 0
    if len(H) == 0:
        return 0
    report = solve(SearchProblem(H, forbidden, induced=induced, node_limit=node_limit))
    if not report.completed:
        raise BudgetExceeded("alpha search ran out of budget", report)
    return report.optimum


def alpha_exhaustive(H: SimpleFamily, forbidden: Sequence[PosetSpec], induced: bool = False) -> int:
    """alpha by scanning every subfamily (at most 2^20), via plain subset tests."""
    from .oracle import exhaustive_optimum_on

    sets = H.sets
    return exhaustive_optimum_on(len(sets), lambda i, j: sets[i] & ~sets[j] == 0, forbidden, induced)


# -- the LYM-type inequality ----------------------------------------------------

@dataclass(frozen=True)
class LymVerdict:
    lhs: Fraction
    alpha: int
    holds: bool
    normalized_lhs: Optional[Fraction]
    normalized_rhs: Optional[Fraction]

    def to_json(self) -> dict:
        def frac(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        return {
            "lhs": frac(self.lhs),
            "alpha": self.alpha,
            "holds": self.holds,
            "normalized_lhs": frac(self.normalized_lhs),
            "normalized_rhs": frac(self.normalized_rhs),
        }


def lym_lhs(F: Family, H: SimpleFamily) -> Fraction:
    L = F.lattice
    return sum((Fraction(H.N(d), q_binomial(L.n, d, L.q)) for d in (L.dims[i] for i in F)), Fraction(0))


def lym_check(
    F: Family,
    H: SimpleFamily,
    forbidden: Sequence[PosetSpec],
    induced: bool = False,
    alpha_value: Optional[int] = None,
) -> LymVerdict:
    """sum over F of N_dim(H) / [n choose dim]_q, compared with alpha(H, P)."""
    L = F.lattice
    if H.n != L.n:
        raise AmbientMismatch(f"H is over n={H.n}, the family over n={L.n}")
    if not is_free(F, forbidden, induced):
        raise NotFree("the family contains a forbidden poset")
    lhs = lym_lhs(F, H)
    a = alpha(H, forbidden, induced) if alpha_value is None else alpha_value
    counts = {c for c in H.level_counts() if c}
    nl = nr = None
    if len(counts) == 1:
        N = counts.pop()
        nl = sum((Fraction(1, q_binomial(L.n, L.dims[i], L.q)) for i in F), Fraction(0))
        nr = Fraction(a, N)
    return LymVerdict(lhs, a, lhs <= a, nl, nr)


# -- basis maps ----------------------------------------------------------------

def split_basis_product(r: int, n: int, q: int) -> int:
    """(q^r - 1)...(q^r - q^(r-1)) * (q^(n-r) - 1)...(q^(n-r) - q^(n-r-1)) = |GL(r,q)| |GL(n-r,q)|."""
    return prod(q ** r - q ** i for i in range(r)) * prod(q ** (n - r) - q ** j for j in range(n - r))


def basis_map_count(r: int, H: SimpleFamily, n: int, q: int) -> int:
    """Ordered bases pi for which a fixed r-dimensional F lies in H^pi.

    For each r-set of H the first r basis vectors must form a basis of F
    (|GL(r,q)| ways) and the rest extend it (q^(r(n-r)) |GL(n-r,q)| ways).
    """
    if not 0 <= r <= n:
        raise OutOfRange(f"need 0 <= r <= n, got r={r}, n={n}")
    if H.n != n:
        raise AmbientMismatch(f"H is over n={H.n}, not {n}")
    return split_basis_product(r, n, q) * q ** (r * (n - r)) * H.N(r)


def basis_map_pairs(H: SimpleFamily, q: int, L: Optional[LinearLattice] = None) -> Counter:
    """For every element F of L(n, q), the number of ordered bases pi with F in H^pi, by enumeration."""
    n = H.n
    L = L or build_lattice(n, q)
    hits: Counter = Counter()
    for basis in general_linear_group(n, q):
        for s in H.sets:
            if s == 0:
                hits[0] += 1
            else:
                hits[L.index_of_rows([basis[i] for i in bits(s)])] += 1
    return hits


# -- maximal chains ------------------------------------------------------------

MAX_CHAIN_ITER_N = 4


def maximal_chain_count(L: LinearLattice) -> int:
    """Number of maximal chains, by counting paths up the cover graph."""
    paths = [0] * len(L)
    paths[0] = 1
    for k in range(L.n):
        for i in L.level(k):
            for j in L.upper_shadow(i):
                paths[j] += paths[i]
    return paths[L.top]


def maximal_chains(L: LinearLattice) -> Iterator[tuple[int, ...]]:
    """Every maximal chain {0} = V_0 < V_1 < ... < V_n = V, as element indices."""
    if L.n > MAX_CHAIN_ITER_N:
        raise TooLarge(f"chain iteration is limited to n <= {MAX_CHAIN_ITER_N}")

    def walk(chain: list[int]) -> Iterator[tuple[int, ...]]:
        last = chain[-1]
        if L.dims[last] == L.n:
            yield tuple(chain)
            return
        for j in L.upper_shadow(last):
            chain.append(j)
            yield from walk(chain)
            chain.pop()

    return walk([0])


def chain_identity_check(n: int, q: int) -> dict:
    """Both sides of the chain double-count identity for odd n >= 3, exactly."""
    left, right = chain_identity_sides(n, q)
    return {"n": n, "q": q, "left": left, "right": right, "holds": left == right and right == q_factorial(n, q)}


# -- closed-form alpha for interval chains ---------------------------------------

@dataclass(frozen=True)
class IntervalChainVerdict:
    k: int
    n: int
    poset: str
    brute_force: int
    closed_form: Fraction
    status: str  # "equal", "below" or "violation"

    @property
    def integral(self) -> bool:
        return self.closed_form.denominator == 1

    def to_json(self) -> dict:
        cf = self.closed_form
        return {
            "k": self.k,
            "n": self.n,
            "poset": self.poset,
            "brute_force": self.brute_force,
            "closed_form": f"{cf.numerator}/{cf.denominator}",
            "integral": self.integral,
            "status": self.status,
        }


def interval_chain_alpha_check(k: int, n: int, P: PosetSpec, induced: bool = False) -> IntervalChainVerdict:
    if k not in (2, 3):
        raise OutOfRange(f"k must be 2 or 3, got {k}")
    if n > 8 or n < k:
        raise OutOfRange(f"n must lie in {k}..8, got {n}")
    if P.m > 5:
        raise OutOfRange(f"|P| must be at most 5, got {P.m}")
    H = interval_chain(n, k).realized
    a = alpha(H, [P], induced)
    closed = interval_chain_alpha(P, k)
    if a == closed:
        status = "equal"
    elif a < closed:
        status = "below"
    else:
        status = "violation"
    return IntervalChainVerdict(k, n, str(P), a, closed, status)


def boolean_family(n: int) -> SimpleFamily:
    """Every subset of {0..n-1}."""
    return SimpleFamily(n, range(1 << n))


eq1_identity_check = chain_identity_check
