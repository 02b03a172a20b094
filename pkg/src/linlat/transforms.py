"""Matching-based level shifting of {V_k, Lambda_l}-free families.

``pushdown`` repeatedly replaces the top level of a family by matched
subspaces one dimension lower; ``dual_pushup`` does the same upwards through
the orthogonal-complement anti-automorphism.  In the induced setting the
replacement candidates for a member A are restricted to M(A), the hyperplanes
of A avoiding one pinned point of every small member below A.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    FreenessViolated,
    FreenessViolatedAfterStep,
    HallFailure,
    LemmaViolation,
    NotAMember,
    OutOfRange,
    PreconditionViolated,
    TooLarge,
)
from .families import Family
from .lattice import LinearLattice, bits
from .matching import hopcroft_karp
from .posets import is_free, named_poset
from .qarith import induced_hall_ratio, q_bracket, weak_hall_ratio


def small_members(F: Family) -> set[int]:
    """Members of F that contain no other member."""
    down = F.lattice.down_strict
    return {i for i in F if not down[i] & F.members}


def _least_point(L: LinearLattice, i: int) -> int:
    pm = L.point_masks[i]
    return L.level_offsets[1] + (pm & -pm).bit_length() - 1


@dataclass(frozen=True)
class MASet:
    A: int
    s: int
    l: int
    q: int
    small_list: tuple[int, ...]
    pins: tuple[int, ...]
    members: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.small_list)

    @property
    def size_bound(self) -> int:
        return q_bracket(self.s, self.q) - (self.l - 1) * q_bracket(self.s - 1, self.q)


def build_ma(F: Family, A: int, l: int) -> MASet:
    """M(A): the (s-1)-subspaces of member A containing none of the pins.

    Each small proper member below A is pinned at its lexicographically least
    point.  All three defining properties are checked before returning.
    """
    L = F.lattice
    if A not in F:
        raise NotAMember(f"element {A} is not in the family")
    s = L.dims[A]
    if s < 1:
        raise PreconditionViolated("A must have dimension at least 1")
    below = L.down_strict[A] & F.members
    small = tuple(sorted(i for i in small_members(F) if below >> i & 1))
    if len(small) >= l:
        raise FreenessViolated(f"A has {len(small)} small members below it, an induced Lambda_{l}")
    if any(L.dims[i] == 0 for i in small):
        raise PreconditionViolated("the zero subspace is a member below A and cannot be pinned")
    pins = tuple(_least_point(L, i) for i in small)
    pin_mask = 0
    for p in pins:
        pin_mask |= L.point_masks[p]
    members = tuple(B for B in L.lower_shadow(A) if not L.point_masks[B] & pin_mask)
    ma = MASet(A, s, l, L.q, small, pins, members)
    _check_ma(F, ma)
    return ma


def _check_ma(F: Family, ma: MASet) -> None:
    L = F.lattice
    s = ma.s
    low = 0
    for k in range(s - 1):
        low |= L.level_mask(k)
    low &= F.members
    for B in ma.members:
        if L.down_strict[B] & low:
            raise LemmaViolation(f"a member of dimension <= {s - 2} lies below {B} in M({ma.A})")
        if B in F:
            raise LemmaViolation(f"{B} is in both M({ma.A}) and the family")
    if len(ma.members) < ma.size_bound:
        raise LemmaViolation(f"|M({ma.A})| = {len(ma.members)} < {ma.size_bound}")


@dataclass(frozen=True)
class PushdownStep:
    s: int
    direction: str
    graph: tuple[tuple[int, int], ...]
    matching: tuple[tuple[int, int], ...]
    replaced: tuple[int, ...]
    min_degree: int
    degree_bound: int
    ratio_chain: tuple[Fraction, ...]
    within_hypothesis: bool

    @property
    def chain_holds(self) -> bool:
        c = self.ratio_chain
        return all(a >= b for a, b in zip(c, c[1:])) and c[-1] >= 1

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "direction": self.direction,
            "edges": [list(e) for e in self.graph],
            "matching": [list(e) for e in self.matching],
            "replaced": list(self.replaced),
            "min_degree": self.min_degree,
            "degree_bound": self.degree_bound,
            "ratio_chain": [f"{x.numerator}/{x.denominator}" for x in self.ratio_chain],
            "chain_holds": self.chain_holds,
            "within_hypothesis": self.within_hypothesis,
        }


def _forbidden(k: int, l: int):
    return (named_poset(f"V:{k}"), named_poset(f"L:{l}"))


def pushdown_hypothesis(n: int, q: int, induced: bool, k: int, l: int, floor: int) -> bool:
    """Whether the matching is guaranteed for every removed level above ``floor``."""
    if induced:
        return k <= q and l <= q and floor >= -(-n // 2)
    return n % 2 == 0 and max(k, l) <= q ** (n // 2) and floor >= n // 2


def _ratio_chain(n: int, q: int, s: int, l: int, induced: bool, floor: int) -> tuple[Fraction, ...]:
    if induced:
        first, second = induced_hall_ratio(n, q, s, l)
        _, last = induced_hall_ratio(n, q, floor + 1, l)
        return (first, second, last)
    first, last = weak_hall_ratio(n, q, s, l)
    return (first, last)


def pushdown(
    F: Family,
    induced: bool,
    k: int,
    l: int,
    floor: Optional[int] = None,
    direction: str = "down",
) -> tuple[Family, list[PushdownStep]]:
    """Move every member above ``floor`` down by matchings, level by level from the top.

    The default floor is ceil(n/2).  Size and freeness are preserved; every
    step is re-verified with the embedding checker.
    """
    L = F.lattice
    n, q = L.n, L.q
    if k < 1 or l < 1:
        raise OutOfRange("k and l must be positive")
    if floor is None:
        floor = -(-n // 2)
    if not 0 <= floor <= n:
        raise OutOfRange(f"floor {floor} outside 0..{n}")
    forbidden = _forbidden(k, l)
    if not is_free(F, forbidden, induced):
        raise FreenessViolated(f"input family is not {'induced ' if induced else ''}{{V_{k}, Lambda_{l}}}-free")
    hyp = pushdown_hypothesis(n, q, induced, k, l, floor)
    steps: list[PushdownStep] = []
    while True:
        support = F.support()
        if not support or support[-1] <= floor:
            break
        t = support[-1]
        top = F.members & L.level_mask(t)
        adj: dict[int, list[int]] = {}
        for A in bits(top):
            if induced:
                adj[A] = list(build_ma(F, A, l).members)
            else:
                adj[A] = [B for B in L.lower_shadow(A) if B not in F]
        m = hopcroft_karp(adj)
        if len(m) < len(adj):
            raise HallFailure(f"no matching saturates the {len(adj)} members of dimension {t}")
        replaced = tuple(sorted(m.values()))
        new_mask = F.members & ~top
        for B in replaced:
            new_mask |= 1 << B
        G = Family(L, new_mask)
        if len(G) != len(F):
            raise FreenessViolatedAfterStep("size changed during a step")
        if not is_free(G, forbidden, induced):
            raise FreenessViolatedAfterStep(f"step at dimension {t} created a forbidden copy")
        degree_bound = q_bracket(t, q) - (l - 1) * (q_bracket(t - 1, q) if induced else 1)
        steps.append(
            PushdownStep(
                s=t,
                direction=direction,
                graph=tuple((A, B) for A in adj for B in adj[A]),
                matching=tuple(sorted(m.items())),
                replaced=replaced,
                min_degree=min(len(v) for v in adj.values()),
                degree_bound=degree_bound,
                ratio_chain=_ratio_chain(n, q, t, l, induced, floor),
                within_hypothesis=hyp,
            )
        )
        F = G
    return F, steps


def dual_pushup(
    F: Family, induced: bool, k: int, l: int, ceiling: Optional[int] = None
) -> tuple[Family, list[PushdownStep]]:
    """Mirror of ``pushdown``: raise every member below ``ceiling`` (default floor(n/2)).

    Runs the pushdown on the orthogonal complements with k and l exchanged and
    maps the result and trace back.
    """
    L = F.lattice
    n = L.n
    if ceiling is None:
        ceiling = n // 2
    if not 0 <= ceiling <= n:
        raise OutOfRange(f"ceiling {ceiling} outside 0..{n}")
    comp = L.complement
    G, steps = pushdown(F.dual(), induced, l, k, floor=n - ceiling, direction="up")
    back = []
    for st in steps:
        back.append(
            PushdownStep(
                s=n - st.s,
                direction="up",
                graph=tuple((comp[a], comp[b]) for a, b in st.graph),
                matching=tuple(sorted((comp[a], comp[b]) for a, b in st.matching)),
                replaced=tuple(sorted(comp[b] for b in st.replaced)),
                min_degree=st.min_degree,
                degree_bound=st.degree_bound,
                ratio_chain=st.ratio_chain,
                within_hypothesis=st.within_hypothesis,
            )
        )
    return G.dual(), back


def to_middle(F: Family, induced: bool, k: int, l: int) -> tuple[Family, list[PushdownStep]]:
    """Pushdown to ceil(n/2) followed by pushup to floor(n/2)."""
    G, down = pushdown(F, induced, k, l)
    H, up = dual_pushup(G, induced, k, l)
    return H, down + up


# -- neighbourhoods in the cover graph between consecutive levels --------------

MAX_SUBSET_SCAN = 20


def cover_neighborhoods(L: LinearLattice, s: int, t: int) -> list[int]:
    """For each element of level s, the bitmask (over level t positions) of its covers in level t."""
    if abs(s - t) != 1 or not (0 <= s <= L.n and 0 <= t <= L.n):
        raise OutOfRange("levels must be consecutive and inside the lattice")
    rel = L.up_strict if t > s else L.down_strict
    off = L.level_offsets[t]
    tmask = L.level_mask(t)
    return [(rel[a] & tmask) >> off for a in L.level(s)]


def tight_subsets(L: LinearLattice, s: int, t: int) -> dict:
    """Scan every subset A' of level s in the cover graph to level t.

    With A = level s and B = level t the graph is biregular, so
    |N(A')| * |A| >= |A'| * |B|.  Returns the subsets meeting this with
    equality (``balanced``) and those with |N(A')| = |A'| (``equal``), each as
    bitmasks over level-s positions.
    """
    nbr = cover_neighborhoods(L, s, t)
    a = len(nbr)
    if a > MAX_SUBSET_SCAN:
        raise TooLarge(f"level {s} has {a} elements, above the {MAX_SUBSET_SCAN}-element scan limit")
    b = len(L.level(t))
    union = [0] * (1 << a)
    balanced = []
    equal = []
    for sub in range(1, 1 << a):
        low = sub & -sub
        union[sub] = union[sub ^ low] | nbr[low.bit_length() - 1]
        size, nsize = sub.bit_count(), union[sub].bit_count()
        if nsize * a == size * b:
            balanced.append(sub)
        if nsize == size:
            equal.append(sub)
    return {"size": a, "other": b, "balanced": balanced, "equal": equal, "full": (1 << a) - 1}


def regular_neighborhood_check(L: LinearLattice, s: int, t: int) -> bool:
    """Only the empty set and the whole level are tight subsets of level s."""
    res = tight_subsets(L, s, t)
    return res["balanced"] == [res["full"]]

