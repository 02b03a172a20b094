"""Forbidden pattern posets and (induced) subposet containment.

Containment is decided on any *order context*: an object exposing
``up_strict`` / ``down_strict`` bitmaps indexed by element (a LinearLattice,
or the set-inclusion order of a simple family).  Families are bitmasks over
that context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import CycleError, OutOfRange, ParseError, UnsupportedShape
from .lattice import bits


@dataclass(frozen=True)
class PosetSpec:
    names: tuple[str, ...]
    lt: frozenset  # pairs (i, j) meaning names[i] < names[j]; transitively closed
    name: str = ""
    up: tuple[int, ...] = field(init=False, repr=False, compare=False)
    down: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = len(self.names)
        up = [0] * m
        down = [0] * m
        for i, j in self.lt:
            up[i] |= 1 << j
            down[j] |= 1 << i
        object.__setattr__(self, "up", tuple(up))
        object.__setattr__(self, "down", tuple(down))

    @property
    def m(self) -> int:
        return len(self.names)

    size = m

    def less(self, i: int, j: int) -> bool:
        return (i, j) in self.lt

    def comparable(self, i: int, j: int) -> bool:
        return (i, j) in self.lt or (j, i) in self.lt

    @property
    def height(self) -> int:
        """Number of elements in a longest chain."""
        if not self.names:
            return 0
        longest = {}
        for i in sorted(range(self.m), key=lambda x: bin(self.down[x]).count("1")):
            below = [longest[j] for j in bits(self.down[i])]
            longest[i] = 1 + max(below, default=0)
        return max(longest.values())

    def dual(self) -> "PosetSpec":
        name = _dual_name(self.name)
        return PosetSpec(self.names, frozenset((j, i) for i, j in self.lt), name)

    def __str__(self) -> str:
        return self.name or f"Poset({', '.join(self.names)})"


def _dual_name(name: str) -> str:
    if name.startswith("V:"):
        return "L:" + name[2:]
    if name.startswith("L:"):
        return "V:" + name[2:]
    if name.startswith("Y':"):
        return "Y:" + name[3:]
    if name.startswith("Y:"):
        return "Y':" + name[2:]
    if name in ("B",) or name.startswith("C:"):
        return name
    return f"dual({name})" if name else ""


def _closure(m: int, pairs: Iterable[tuple[int, int]]) -> frozenset:
    reach = [set() for _ in range(m)]
    for i, j in pairs:
        reach[i].add(j)
    changed = True
    while changed:
        changed = False
        for i in range(m):
            extra = set()
            for j in reach[i]:
                extra |= reach[j] - reach[i]
            if extra:
                reach[i] |= extra
                changed = True
    if any(i in reach[i] for i in range(m)):
        raise CycleError("relations contain a cycle")
    return frozenset((i, j) for i in range(m) for j in reach[i])


def make_poset(names: Sequence[str], relations: Iterable[tuple[str, str]], name: str = "") -> PosetSpec:
    """Poset on ``names`` generated by ``a < b`` relations (transitively closed)."""
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ParseError(f"duplicate element names in {names}")
    pos = {x: i for i, x in enumerate(names)}
    try:
        pairs = [(pos[a], pos[b]) for a, b in relations]
    except KeyError as exc:
        raise ParseError(f"unknown element {exc.args[0]!r}") from None
    return PosetSpec(names, _closure(len(names), pairs), name)


_NAMED = re.compile(r"^\s*(V|L|Λ|Y'|Y|C)\s*:\s*(-?\d+)\s*$")


def named_poset(spec: str) -> PosetSpec:
    """V:k, L:l (Lambda), B (butterfly), Y:k, Y':k, C:h (chain)."""
    s = spec.strip()
    if s == "B":
        return make_poset("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")], "B")
    m = _NAMED.match(s)
    if not m:
        raise ParseError(f"unrecognized poset {spec!r}")
    kind, k = m.group(1), int(m.group(2))
    if kind == "Λ":
        kind = "L"
    if k < 1:
        raise OutOfRange(f"parameter must be positive in {spec!r}")
    if kind == "V":
        xs = [f"x{i}" for i in range(1, k + 1)]
        return make_poset(["y"] + xs, [("y", x) for x in xs], f"V:{k}")
    if kind == "L":
        xs = [f"x{i}" for i in range(1, k + 1)]
        return make_poset(xs + ["y"], [(x, "y") for x in xs], f"L:{k}")
    if kind == "C":
        xs = [f"c{i}" for i in range(1, k + 1)]
        return make_poset(xs, list(zip(xs, xs[1:])), f"C:{k}")
    xs = [f"x{i}" for i in range(1, k + 1)]
    rel = list(zip(xs, xs[1:])) + [(xs[-1], "y"), (xs[-1], "z")]
    Y = make_poset(xs + ["y", "z"], rel, f"Y:{k}")
    return Y if kind == "Y" else Y.dual()


def parse_poset_dsl(text: str) -> PosetSpec:
    """Parse ``elements: a,b,c; relations: a<c, b<c`` (``>`` also accepted)."""
    m = re.fullmatch(r"\s*elements\s*:(?P<el>[^;]*);\s*relations\s*:(?P<rel>.*)", text, re.S)
    if not m:
        raise ParseError(f"expected 'elements: ...; relations: ...', got {text!r}")
    names = [x.strip() for x in m.group("el").split(",") if x.strip()]
    if not names:
        raise ParseError("a poset needs at least one element")
    rels = []
    for chunk in m.group("rel").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        r = re.fullmatch(r"(\S+?)\s*([<>])\s*(\S+)", chunk)
        if not r:
            raise ParseError(f"bad relation {chunk!r}")
        a, op, b = r.groups()
        rels.append((a, b) if op == "<" else (b, a))
    return make_poset(names, rels)


def parse_forbidden(text: str) -> tuple[PosetSpec, ...]:
    """Comma-separated named posets, e.g. ``V:2,L:2`` or ``Y:2,Y':2``."""
    return tuple(named_poset(part) for part in text.split(",") if part.strip())


def fork_shape(P: PosetSpec) -> Optional[tuple[str, int]]:
    """('V', k) if P is V_k, ('L', l) if P is Lambda_l, else None.  The 2-chain reports ('V', 1)."""
    m = P.m
    if m < 2 or len(P.lt) != m - 1:
        return None
    for y in range(m):
        others = [x for x in range(m) if x != y]
        if all((y, x) in P.lt for x in others):
            return ("V", m - 1)
        if all((x, y) in P.lt for x in others):
            return ("L", m - 1)
    return None


# -- embedding search ---------------------------------------------------------

def _viable(P: PosetSpec, ctx, members: int) -> list[int]:
    """Per P-element, the members with enough comparable members to host it."""
    need_up = [p.bit_count() for p in P.up]
    need_down = [p.bit_count() for p in P.down]
    out = [0] * P.m
    up, down = ctx.up_strict, ctx.down_strict
    for e in bits(members):
        nu = (up[e] & members).bit_count()
        nd = (down[e] & members).bit_count()
        bit = 1 << e
        for p in range(P.m):
            if nu >= need_up[p] and nd >= need_down[p]:
                out[p] |= bit
    return out


def find_embedding(
    P: PosetSpec,
    ctx,
    members: int,
    induced: bool,
    force: Optional[int] = None,
) -> Optional[tuple[int, ...]]:
    """Injection phi: P -> members preserving (and, if induced, reflecting) the order.

    Without ``force`` the result is the lexicographically least (phi(0), phi(1), ...).
    With ``force`` only embeddings whose image contains that element are considered.
    """
    m = P.m
    if m == 0:
        return ()
    if members.bit_count() < m:
        return None
    up, down = ctx.up_strict, ctx.down_strict
    viable = _viable(P, ctx, members)
    phi = [-1] * m

    def candidates(p: int, used: int) -> int:
        cand = viable[p] & ~used
        for i in range(m):
            e = phi[i]
            if e < 0:
                continue
            if (i, p) in P.lt:
                cand &= up[e]
            elif (p, i) in P.lt:
                cand &= down[e]
            elif induced:
                cand &= ~(up[e] | down[e])
            if not cand:
                return 0
        return cand

    def extend(p: int, used: int) -> bool:
        while p < m and phi[p] >= 0:
            p += 1
        if p == m:
            return True
        for e in bits(candidates(p, used)):
            phi[p] = e
            if extend(p + 1, used | (1 << e)):
                return True
        phi[p] = -1
        return False

    if force is None:
        return tuple(phi) if extend(0, 0) else None
    fbit = 1 << force
    if not members & fbit:
        return None
    for p in range(m):
        if not viable[p] & fbit:
            continue
        phi = [-1] * m
        phi[p] = force
        # the forced element must respect nothing yet; other slots are checked against it
        if extend(0, fbit):
            return tuple(phi)
    return None


def embeds(P: PosetSpec, F, induced: bool = False) -> Optional[dict[str, int]]:
    """Lexicographically least embedding of P into family F, as {P-element name: element index}."""
    phi = find_embedding(P, F.lattice, F.members, induced)
    if phi is None:
        return None
    return dict(zip(P.names, phi))


def contains_any(ctx, members: int, forbidden: Iterable[PosetSpec], induced: bool) -> bool:
    return any(find_embedding(P, ctx, members, induced) is not None for P in forbidden)


def is_free(F, forbidden: Iterable[PosetSpec], induced: bool = False) -> bool:
    """Independent (embedding-search) freeness check for arbitrary forbidden posets."""
    return not contains_any(F.lattice, F.members, forbidden, induced)


# -- antichains and the fork fast path ----------------------------------------

def has_antichain(ctx, mask: int, size: int) -> bool:
    """Does ``mask`` contain ``size`` pairwise incomparable elements?"""
    if size <= 0:
        return True
    if mask.bit_count() < size:
        return False
    if size == 1:
        return True
    up, down = ctx.up_strict, ctx.down_strict
    if size <= 4:
        elems = list(bits(mask))
        for combo in combinations(elems, size):
            if all(not ((up[a] | down[a]) >> b & 1) for a, b in combinations(combo, 2)):
                return True
        return False

    def grow(cand: int, need: int) -> bool:
        if need == 0:
            return True
        if cand.bit_count() < need:
            return False
        for e in bits(cand):
            cand &= ~(1 << e)
            if grow(cand & ~(up[e] | down[e]), need - 1):
                return True
            if cand.bit_count() < need:
                return False
        return False

    return grow(mask, size)


def fork_free(ctx, members: int, shape: tuple[str, int], induced: bool) -> bool:
    kind, k = shape
    rel = ctx.up_strict if kind == "V" else ctx.down_strict
    for x in bits(members):
        above = rel[x] & members
        if induced:
            if has_antichain(ctx, above, k):
                return False
        elif above.bit_count() >= k:
            return False
    return True


def fast_free_check(F, forbidden: Iterable[PosetSpec], induced: bool = False) -> bool:
    """Freeness for V_k / Lambda_l patterns by counting (weak) or antichain width (induced)."""
    shapes = []
    for P in forbidden:
        shape = fork_shape(P)
        if shape is None:
            raise UnsupportedShape(f"{P} is not a V_k or Lambda_l poset")
        shapes.append(shape)
    return all(fork_free(F.lattice, F.members, s, induced) for s in shapes)
