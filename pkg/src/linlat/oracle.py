"""Plain exhaustive scan over every subfamily of a small lattice.

Deliberately shares no code with the branch-and-bound engine: comparability
comes from row reduction (``lattice.contains``), copies are detected by trying
every bijection between the pattern and a |P|-subset, and freeness of larger
families follows from monotonicity (a copy of P uses exactly |P| members).
"""

from __future__ import annotations

from itertools import permutations
from typing import Callable, Optional, Sequence

from .lattice import LinearLattice, contains
from .posets import PosetSpec

MAX_SCAN = 20


def row_reduction_leq(L: LinearLattice) -> Callable[[int, int], bool]:
    table: dict[tuple[int, int], bool] = {}
    elems = L.elements

    def leq(i: int, j: int) -> bool:
        key = (i, j)
        if key not in table:
            table[key] = contains(elems[j], elems[i])
        return table[key]

    return leq


def is_copy(P: PosetSpec, elements: Sequence[int], leq: Callable[[int, int], bool], induced: bool) -> bool:
    """Does some bijection P -> elements preserve (and, if induced, reflect) the order?"""
    m = P.m
    if len(elements) != m:
        return False
    for image in permutations(elements):
        ok = True
        for a in range(m):
            for b in range(m):
                if a == b:
                    continue
                related = leq(image[a], image[b])
                if P.less(a, b) and not related:
                    ok = False
                    break
                if induced and related and not P.less(a, b):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def free_table(
    L: LinearLattice,
    forbidden: Sequence[PosetSpec],
    induced: bool,
    elements: Optional[Sequence[int]] = None,
    leq: Optional[Callable[[int, int], bool]] = None,
) -> tuple[list[int], bytearray]:
    """Freeness of every subset of ``elements`` (default: the whole lattice).

    Returns (elements, table) where ``table[s]`` is 1 iff the subfamily picked
    by the bits of s (positions into ``elements``) is free.
    """
    elements = list(range(len(L))) if elements is None else list(elements)
    return elements, subset_free_table(elements, leq or row_reduction_leq(L), forbidden, induced)


def subset_free_table(
    elements: Sequence[int],
    leq: Callable[[int, int], bool],
    forbidden: Sequence[PosetSpec],
    induced: bool,
) -> bytearray:
    m = len(elements)
    if m > MAX_SCAN:
        raise ValueError(f"exhaustive scan over {m} elements is beyond the {MAX_SCAN}-element limit")
    sizes = {P.m for P in forbidden}
    table = bytearray(1 << m)
    for s in range(1 << m):
        c = s.bit_count()
        ok = True
        t = s
        while t:
            low = t & -t
            if not table[s ^ low]:
                ok = False
                break
            t ^= low
        if ok and c in sizes:
            chosen = [elements[i] for i in range(m) if s >> i & 1]
            if any(P.m == c and is_copy(P, chosen, leq, induced) for P in forbidden):
                ok = False
        table[s] = ok
    return table


def exhaustive_optimum_on(
    m: int, leq: Callable[[int, int], bool], forbidden: Sequence[PosetSpec], induced: bool
) -> int:
    """Largest free subset of 0..m-1 under the order ``leq``."""
    table = subset_free_table(range(m), leq, forbidden, induced)
    return max(s.bit_count() for s in range(len(table)) if table[s])


def exhaustive_optimum(
    L: LinearLattice,
    forbidden: Sequence[PosetSpec],
    induced: bool,
    elements: Optional[Sequence[int]] = None,
) -> tuple[int, list[int]]:
    """(optimum, extremal families as global bitmasks sorted by member indices)."""
    elements, table = free_table(L, forbidden, induced, elements)
    best = 0
    found: list[int] = []
    for s in range(len(table)):
        if not table[s]:
            continue
        c = s.bit_count()
        if c > best:
            best, found = c, [s]
        elif c == best:
            found.append(s)
    masks = []
    for s in found:
        g = 0
        for i, e in enumerate(elements):
            if s >> i & 1:
                g |= 1 << e
        masks.append(g)
    masks.sort(key=lambda g: [i for i in range(len(L)) if g >> i & 1])
    return best, masks
