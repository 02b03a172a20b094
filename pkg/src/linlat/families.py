"""Families of subspaces: bitsets over one LinearLattice, canonical constructions,
the averaging structure lemmas and the file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import AmbientMismatch, LemmaViolation, OutOfRange, PreconditionViolated, WrongLattice
from .lattice import LinearLattice, Subspace, bits, build_lattice
from .qarith import q_binomial


@dataclass(frozen=True)
class Family:
    lattice: LinearLattice
    members: int = 0

    def __post_init__(self):
        if self.members < 0 or self.members >> len(self.lattice):
            raise OutOfRange("family has bits outside the lattice")

    @classmethod
    def from_indices(cls, lattice: LinearLattice, indices: Iterable[int]) -> "Family":
        mask = 0
        for i in indices:
            if not 0 <= i < len(lattice):
                raise OutOfRange(f"element index {i} outside 0..{len(lattice) - 1}")
            mask |= 1 << i
        return cls(lattice, mask)

    @classmethod
    def from_subspaces(cls, lattice: LinearLattice, subspaces: Iterable[Subspace]) -> "Family":
        return cls.from_indices(lattice, (lattice.index_of(s) for s in subspaces))

    def __len__(self) -> int:
        return self.members.bit_count()

    size = property(__len__)

    def __iter__(self):
        return bits(self.members)

    def __contains__(self, i: int) -> bool:
        return bool(self.members >> i & 1)

    def indices(self) -> list[int]:
        return list(bits(self.members))

    def subspaces(self) -> list[Subspace]:
        return [self.lattice.elements[i] for i in bits(self.members)]

    def level_counts(self) -> list[int]:
        L = self.lattice
        return [(self.members & L.level_mask(k)).bit_count() for k in range(L.n + 1)]

    def level_part(self, k: int) -> "Family":
        return Family(self.lattice, self.members & self.lattice.level_mask(k))

    def support(self) -> list[int]:
        return [k for k, c in enumerate(self.level_counts()) if c]

    def _same(self, other: "Family") -> None:
        if other.lattice is not self.lattice:
            raise AmbientMismatch("families live in different lattices")

    def __or__(self, other: "Family") -> "Family":
        self._same(other)
        return Family(self.lattice, self.members | other.members)

    def __and__(self, other: "Family") -> "Family":
        self._same(other)
        return Family(self.lattice, self.members & other.members)

    def __sub__(self, other: "Family") -> "Family":
        self._same(other)
        return Family(self.lattice, self.members & ~other.members)

    def with_(self, *indices: int) -> "Family":
        return Family.from_indices(self.lattice, list(self) + list(indices))

    def dual(self) -> "Family":
        """Image under the orthogonal-complement anti-automorphism."""
        comp = self.lattice.complement
        return Family.from_indices(self.lattice, (comp[i] for i in self))

    def to_json(self) -> dict:
        return {
            "n": self.lattice.n,
            "q": self.lattice.q,
            "subspaces": [s.to_json() for s in self.subspaces()],
        }

    def __repr__(self) -> str:
        return f"Family(L({self.lattice.n},{self.lattice.q}), size={len(self)}, levels={self.level_counts()})"


def family_from_json(doc: dict, lattice: Optional[LinearLattice] = None) -> Family:
    """Load the {"n", "q", "subspaces"} format; rows may be any spanning set."""
    n, q = int(doc["n"]), int(doc["q"])
    if lattice is None:
        lattice = build_lattice(n, q)
    elif (lattice.n, lattice.q) != (n, q):
        raise WrongLattice(f"document is over L({n},{q}), lattice is L({lattice.n},{lattice.q})")
    idx = []
    for rows in doc["subspaces"]:
        rows = [list(r) for r in rows]
        if not rows:
            idx.append(0)
            continue
        idx.append(lattice.index_of_rows(rows))
    return Family.from_indices(lattice, idx)


def load_family(path: str, lattice: Optional[LinearLattice] = None) -> Family:
    with open(path) as fh:
        return family_from_json(json.load(fh), lattice)


def dump_family(F: Family, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(F.to_json(), fh, indent=1)
        fh.write("\n")


def level_family(L: LinearLattice, k: int) -> Family:
    return Family(L, L.level_mask(k))


def union_of_levels(L: LinearLattice, ks: Iterable[int]) -> Family:
    ks = list(ks)
    if len(set(ks)) != len(ks):
        raise OutOfRange(f"repeated dimension in {ks}")
    mask = 0
    for k in ks:
        mask |= L.level_mask(k)
    return Family(L, mask)


def is_level(F: Family) -> bool:
    return len(F.support()) == 1 and F.members == F.lattice.level_mask(F.support()[0])


# -- structure lemmas ---------------------------------------------------------

@dataclass(frozen=True)
class StructureWitness:
    element: int                # the member of the outer level
    inner_count: int            # its comparable members in the middle level
    threshold: int              # q^ceil(n/2)
    relation_count: int         # comparable pairs between the two parts
    relation_lower_bound: int   # the averaging argument's lower bound on that count


def structure_lemma_check(F: Family, side: str = "up") -> Optional[StructureWitness]:
    """Averaging lemma on two adjacent middle levels.

    side="up": F on dims {c, c+1} with c = ceil(n/2) and |F| = [n choose c]_q;
    returns a member of dim c+1 having >= q^c members of dim c below it, or
    None when F has no dim c+1 part.  side="down" is the order dual, on dims
    {f-1, f} with f = floor(n/2), and looks for >= q^ceil(n/2) members above.
    """
    L = F.lattice
    n, q = L.n, L.q
    c = -(-n // 2)
    threshold = q ** c
    if side == "up":
        mid, outer = c, c + 1
        rel = L.down_strict
        outer_cover, inner_cover = outer, n - c
    elif side == "down":
        mid, outer = n // 2, n // 2 - 1
        rel = L.up_strict
        outer_cover, inner_cover = n - outer, mid
    else:
        raise ValueError(f"side must be 'up' or 'down', got {side!r}")
    if not 0 <= outer <= n:
        raise PreconditionViolated(f"level {outer} does not exist in L({n},{q})")
    if any(k not in (mid, outer) for k in F.support()):
        raise PreconditionViolated(f"family must live on dimensions {{{mid}, {outer}}}, has {F.support()}")
    target = q_binomial(n, mid, q)
    if len(F) != target:
        raise PreconditionViolated(f"family must have size {target}, has {len(F)}")
    outer_part = F.members & L.level_mask(outer)
    if not outer_part:
        return None
    mid_part = F.members & L.level_mask(mid)
    from .qarith import q_bracket

    counts = {a: (rel[a] & mid_part).bit_count() for a in bits(outer_part)}
    relations = sum(counts.values())
    missing = (L.level_mask(mid) & ~mid_part).bit_count()
    lower = q_bracket(outer_cover, q) * outer_part.bit_count() - q_bracket(inner_cover, q) * missing
    best = min(counts, key=lambda a: (-counts[a], a))
    if relations < lower or relations < threshold * outer_part.bit_count() or counts[best] < threshold:
        raise LemmaViolation(f"averaging bound failed: {relations} relations, witness count {counts[best]}")
    return StructureWitness(best, counts[best], threshold, relations, lower)


def between(F: Family, low: int, high: int) -> Family:
    """Members X of F with low <= X <= high (both endpoints lattice elements)."""
    L = F.lattice
    mask = (L.up_strict[low] | 1 << low) & (L.down_strict[high] | 1 << high)
    return Family(L, F.members & mask)


def fact_equality_check(F: Family) -> dict:
    """For odd n and F on the two middle levels of size [n choose (n+1)/2]_q, count the
    members between every pair G2 <= G1 of dims (n-3)/2 and (n+3)/2.

    Returns {"pairs": number of pairs, "sizes": sorted set of counts seen}; the
    equality fact says the only count is q^2 + q + 1.
    """
    L = F.lattice
    n, q = L.n, L.q
    if n % 2 == 0 or n < 3:
        raise PreconditionViolated("needs odd n >= 3")
    lo, hi = (n - 3) // 2, (n + 3) // 2
    if any(k not in ((n - 1) // 2, (n + 1) // 2) for k in F.support()):
        raise PreconditionViolated("family must live on the two middle levels")
    if len(F) != q_binomial(n, (n + 1) // 2, q):
        raise PreconditionViolated("family must have maximum size")
    sizes = set()
    pairs = 0
    for g1 in L.level(hi):
        for g2 in bits(L.down_strict[g1] & L.level_mask(lo)) if lo < hi else ():
            pairs += 1
            sizes.add(len(between(F, g2, g1)))
    return {"pairs": pairs, "sizes": sorted(sizes), "expected": q * q + q + 1}


# -- the exceptional n = 3, q = 2 families ------------------------------------

def comparability_structure(F: Family) -> tuple[int, int]:
    """(number of comparable pairs, number of members comparable to nothing else in F)."""
    L = F.lattice
    pairs = 0
    isolated = 0
    for i in F:
        related = (L.up_strict[i] | L.down_strict[i]) & F.members
        pairs += (L.up_strict[i] & F.members).bit_count()
        if not related:
            isolated += 1
    return pairs, isolated


def exceptional_families(L: LinearLattice, induced: bool = True) -> list[Family]:
    """Maximum {V, Lambda}-free families of L(3, 2) that are not single levels, found by search."""
    if (L.n, L.q) != (3, 2):
        raise WrongLattice(f"exceptional families are defined on L(3,2), got L({L.n},{L.q})")
    return list(_exceptional_cached(L, induced))


_EXCEPTIONAL: dict = {}


def _exceptional_cached(L: LinearLattice, induced: bool) -> tuple[Family, ...]:
    key = (id(L), induced)
    if key not in _EXCEPTIONAL:
        from .posets import parse_forbidden
        from .search import SearchProblem, solve

        report = solve(SearchProblem(L, parse_forbidden("V:2,L:2"), induced=induced, mode="enumerate-extremal"))
        _EXCEPTIONAL[key] = tuple(F for F in report.extremal if not is_level(F))
    return _EXCEPTIONAL[key]


def orbit_representatives(masks: Iterable[int], perms: list[tuple[int, ...]]) -> dict[tuple[int, ...], list[int]]:
    """Group family bitmasks into orbits under the given element permutations.

    Keys are canonical forms (lexicographically least sorted image), values the members of each orbit.
    """
    orbits: dict[tuple[int, ...], list[int]] = {}
    for mask in masks:
        members = list(bits(mask))
        canon = min(tuple(sorted(p[i] for i in members)) for p in perms)
        orbits.setdefault(canon, []).append(mask)
    return orbits


def exceptional_orbit_counts(L: LinearLattice, induced: bool = True) -> dict:
    """Labelled count and orbit counts of the non-level maxima of L(3, 2).

    Orbits are taken under the projective group (order-preserving) and under
    that group extended by orthogonal complement (order-reversing maps too).
    """
    from .lattice import collineations

    fams = exceptional_families(L, induced)
    perms = collineations(L)
    comp = L.complement
    with_duality = perms + [tuple(comp[p[i]] for i in range(len(L))) for p in perms]
    masks = [F.members for F in fams]
    return {
        "labelled": len(fams),
        "group_order": len(perms),
        "orbits_order_preserving": len(orbit_representatives(masks, perms)),
        "orbits_with_duality": len(orbit_representatives(masks, with_duality)),
    }


fig1_families = exceptional_families
