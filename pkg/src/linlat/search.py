"""Exact La_q(n, P) / La*_q(n, P) by branch and bound over lattice elements.

The engine works on any order context (``up_strict`` / ``down_strict``
bitmaps plus a ``rank`` per element), so the same code computes alpha(H, P)
for simple families in :mod:`linlat.lym`.

Search state is a pair of bitmasks: the chosen family ``S`` and the
candidates ``R`` that can each still be added to ``S`` without creating a
forbidden copy.  Two bounds prune: ``|S| + |R|``, and for V_k / Lambda_l
patterns a degree bound that subtracts, over disjoint groups, the candidates
a chosen member can no longer accept above (or below) it.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import BudgetExceeded, OutOfRange
from .families import Family
from .lattice import bits, build_lattice
from .posets import PosetSpec, find_embedding, fork_shape, has_antichain
from .qarith import plane_bound_condition, plane_structure_condition

MODES = ("max-size", "enumerate-extremal")


@dataclass
class SearchProblem:
    lattice: object
    forbidden: Sequence[PosetSpec]
    induced: bool = False
    dim_range: Optional[tuple[int, int]] = None
    mode: str = "max-size"
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None
    split_depth: int = 4

    def __post_init__(self):
        self.forbidden = tuple(self.forbidden)
        if not self.forbidden:
            raise ValueError("at least one forbidden poset is required")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        top = self.lattice.n
        if self.dim_range is None:
            self.dim_range = (0, top)
        lo, hi = self.dim_range
        if not 0 <= lo <= hi <= top:
            raise OutOfRange(f"dimension range {self.dim_range} outside 0..{top}")
        self.dim_range = (lo, hi)

    @property
    def allowed_mask(self) -> int:
        lo, hi = self.dim_range
        mask = 0
        for i, r in enumerate(self.lattice.rank):
            if lo <= r <= hi:
                mask |= 1 << i
        return mask

    def config(self) -> dict:
        return {
            "n": self.lattice.n,
            "q": getattr(self.lattice, "q", None),
            "forbidden": [str(P) for P in self.forbidden],
            "induced": self.induced,
            "dim_range": list(self.dim_range),
            "mode": self.mode,
            "node_limit": self.node_limit,
            "time_limit": self.time_limit,
        }


@dataclass
class SearchReport:
    problem: SearchProblem
    optimum: int
    extremal_masks: list[int]
    witness_mask: int
    nodes_explored: int
    completed: bool
    bound_certificates: dict[str, int]
    initial_bound: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def extremal(self) -> list[Family]:
        return [Family(self.problem.lattice, m) for m in self.extremal_masks]

    @property
    def witness(self) -> Family:
        return Family(self.problem.lattice, self.witness_mask)

    def to_json(self) -> dict:
        lat = self.problem.lattice
        doc = {
            "problem": self.problem.config(),
            "optimum": self.optimum,
            "completed": self.completed,
            "nodes_explored": self.nodes_explored,
            "bound_certificates": dict(sorted(self.bound_certificates.items())),
            "initial_bound": self.initial_bound,
            "witness": Family(lat, self.witness_mask).to_json() if hasattr(lat, "elements") else list(bits(self.witness_mask)),
        }
        if self.problem.mode == "enumerate-extremal":
            if hasattr(lat, "elements"):
                doc["extremal"] = [F.to_json()["subspaces"] for F in self.extremal]
            else:
                doc["extremal"] = [list(bits(m)) for m in self.extremal_masks]
            doc["extremal_count"] = len(self.extremal_masks)
        return doc


class _Budget(Exception):
    pass


class _LocalOrder:
    """The allowed elements relabelled 0..m-1 in branching order."""

    def __init__(self, ctx, allowed: int):
        n = ctx.n
        order = sorted(bits(allowed), key=lambda i: (abs(2 * ctx.rank[i] - n), ctx.rank[i], i))
        self.order = order
        pos = {g: i for i, g in enumerate(order)}

        def local(mask: int) -> int:
            out = 0
            for g in bits(mask & allowed):
                out |= 1 << pos[g]
            return out

        self.up_strict = [local(ctx.up_strict[g]) for g in order]
        self.down_strict = [local(ctx.down_strict[g]) for g in order]
        self.rank = [ctx.rank[g] for g in order]
        ranks = sorted(set(self.rank))
        self.rank_masks = [sum(1 << i for i, r in enumerate(self.rank) if r == k) for k in ranks]

    def to_global(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.order[i]
        return out


class _Solver:
    def __init__(self, ctx, forbidden: Sequence[PosetSpec], induced: bool, allowed: int, enumerate_all: bool):
        self.lo = _LocalOrder(ctx, allowed)
        self.induced = induced
        self.enumerate_all = enumerate_all
        self.forks: list[tuple[str, int]] = []
        self.generic: list[PosetSpec] = []
        for P in forbidden:
            shape = fork_shape(P)
            if shape is None:
                self.generic.append(P)
            else:
                self.forks.append(shape)

    # -- feasibility -----------------------------------------------------------

    def can_add(self, S: int, y: int) -> bool:
        lo = self.lo
        up, down = lo.up_strict, lo.down_strict
        for kind, k in self.forks:
            if kind == "V":
                above_y, below_y, rel = up[y], down[y], up
            else:
                above_y, below_y, rel = down[y], up[y], down
            if self.induced:
                if has_antichain(lo, above_y & S, k):
                    return False
                comp_y = up[y] | down[y]
                for x in bits(below_y & S):
                    if has_antichain(lo, rel[x] & S & ~comp_y, k - 1):
                        return False
            else:
                if (above_y & S).bit_count() >= k:
                    return False
                for x in bits(below_y & S):
                    if (rel[x] & S).bit_count() >= k - 1:
                        return False
        ybit = 1 << y
        for P in self.generic:
            if find_embedding(P, lo, S | ybit, self.induced, force=y) is not None:
                return False
        return True

    def filter(self, S: int, R: int) -> int:
        out = 0
        for z in bits(R):
            if self.can_add(S, z):
                out |= 1 << z
        return out

    def degree_excess(self, S: int, R: int) -> int:
        lo = self.lo
        groups = []
        for kind, k in self.forks:
            rel = lo.up_strict if kind == "V" else lo.down_strict
            for x in bits(S):
                group = rel[x] & R
                if not group:
                    continue
                have = (rel[x] & S).bit_count()
                if self.induced:
                    pool = rel[x] & (S | R)
                    cap = sum(min(k - 1, (pool & rm).bit_count()) for rm in lo.rank_masks) - have
                else:
                    cap = k - 1 - have
                excess = group.bit_count() - max(cap, 0)
                if excess > 0:
                    groups.append((excess, group))
        if not groups:
            return 0
        groups.sort(key=lambda t: -t[0])
        used = 0
        total = 0
        for excess, group in groups:
            if not group & used:
                used |= group
                total += excess
        return total

    # -- branch and bound ------------------------------------------------------

    def run(self, S: int, R: int, best: int, node_limit: Optional[int], deadline: Optional[float]) -> dict:
        self.best = best
        self.found: list[int] = []
        self.nodes = 0
        self.stats = {"pruned_size": 0, "pruned_degree": 0, "leaves": 0}
        self.node_limit = node_limit
        self.deadline = deadline
        completed = True
        try:
            self._rec(S, R)
        except _Budget:
            completed = False
        return {
            "best": self.best,
            "found": [self.lo.to_global(m) for m in self.found],
            "nodes": self.nodes,
            "stats": self.stats,
            "completed": completed,
        }

    def _need(self) -> int:
        return self.best if self.enumerate_all else self.best + 1

    def _tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _Budget
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _Budget

    def _record(self, S: int) -> None:
        size = S.bit_count()
        self.stats["leaves"] += 1
        if size > self.best:
            self.best = size
            self.found = [S]
        elif size == self.best and self.enumerate_all:
            self.found.append(S)

    def _rec(self, S: int, R: int) -> None:
        self._tick()
        if not R:
            if S.bit_count() >= self._need():
                self._record(S)
            return
        ub = S.bit_count() + R.bit_count()
        need = self._need()
        if ub < need:
            self.stats["pruned_size"] += 1
            return
        if self.forks and ub - self.degree_excess(S, R) < need:
            self.stats["pruned_degree"] += 1
            return
        y = (R & -R).bit_length() - 1
        rest = R & (R - 1)
        S1 = S | 1 << y
        self._rec(S1, self.filter(S1, rest))
        self._rec(S, rest)

    def split(self, depth: int) -> tuple[list[tuple[int, int]], int]:
        """Expand the first ``depth`` branching levels; returns (subproblems, nodes used)."""
        frontier = [(0, self.filter(0, (1 << len(self.lo.order)) - 1))]
        nodes = 0
        for _ in range(depth):
            nxt = []
            for S, R in frontier:
                if not R:
                    nxt.append((S, R))
                    continue
                nodes += 1
                y = (R & -R).bit_length() - 1
                rest = R & (R - 1)
                S1 = S | 1 << y
                nxt.append((S1, self.filter(S1, rest)))
                nxt.append((S, rest))
            frontier = nxt
        return frontier, nodes


def _run_sub(args) -> dict:
    solver, S, R, best, limit, deadline = args
    return solver.run(S, R, best, limit, deadline)


def level_lower_bound(ctx, allowed: int, forbidden: Sequence[PosetSpec]) -> tuple[int, int]:
    """(size, mask) of the largest rank level inside ``allowed`` when every pattern has height >= 2."""
    if any(P.height < 2 for P in forbidden):
        return 0, 0
    by_rank: dict[int, int] = {}
    for i in bits(allowed):
        by_rank[ctx.rank[i]] = by_rank.get(ctx.rank[i], 0) | 1 << i
    if not by_rank:
        return 0, 0
    mask = max(by_rank.values(), key=lambda m: (m.bit_count(), -m))
    return mask.bit_count(), mask


def _family_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def solve(p: SearchProblem, workers: int = 1) -> SearchReport:
    """Exact maximum (and optionally every maximum) P-free family for problem p.

    The first ``p.split_depth`` branching levels are expanded into independent
    subtrees, each searched from the same initial bound, so the report does
    not depend on ``workers``.
    """
    t0 = time.monotonic()
    ctx = p.lattice
    allowed = p.allowed_mask
    enumerate_all = p.mode == "enumerate-extremal"
    init, init_mask = level_lower_bound(ctx, allowed, p.forbidden)
    solver = _Solver(ctx, p.forbidden, p.induced, allowed, enumerate_all)
    subs, split_nodes = solver.split(p.split_depth)
    limit = None
    if p.node_limit is not None:
        limit = max(1, (p.node_limit - split_nodes) // max(len(subs), 1))
    deadline = t0 + p.time_limit if p.time_limit is not None else None
    jobs = [(solver, S, R, init, limit, deadline) for S, R in subs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_sub, jobs))
    else:
        results = [_run_sub(j) for j in jobs]

    best = max([init] + [r["best"] for r in results])
    found: set[int] = set()
    for r in results:
        if r["best"] == best:
            found.update(r["found"])
    stats = {"pruned_size": 0, "pruned_degree": 0, "leaves": 0}
    for r in results:
        for key, v in r["stats"].items():
            stats[key] += v
    stats["subtrees"] = len(subs)
    extremal = sorted(found, key=_family_key)
    if best == init and init_mask and not enumerate_all:
        witness = init_mask
    else:
        witness = extremal[0] if extremal else init_mask
    if not enumerate_all:
        extremal = [witness] if best else []
    return SearchReport(
        problem=p,
        optimum=best,
        extremal_masks=extremal,
        witness_mask=witness,
        nodes_explored=split_nodes + sum(r["nodes"] for r in results),
        completed=all(r["completed"] for r in results),
        bound_certificates=stats,
        initial_bound=init,
        elapsed=time.monotonic() - t0,
    )


def solve_or_raise(p: SearchProblem, workers: int = 1) -> SearchReport:
    report = solve(p, workers)
    if not report.completed:
        raise BudgetExceeded("search budget exhausted before the optimum was certified", report)
    return report


@dataclass
class TwoLevelReport:
    q: int
    k: int
    l: int
    report: SearchReport
    bound_condition: bool
    structure_condition: bool

    @property
    def optimum(self) -> int:
        return self.report.optimum

    @property
    def plane_size(self) -> int:
        return self.q * self.q + self.q + 1

    @property
    def bound_ok(self) -> bool:
        """The size bound holds, or was not claimed."""
        return not self.bound_condition or self.optimum <= self.plane_size

    @property
    def levels_only(self) -> bool:
        from .families import is_level

        return all(is_level(F) for F in self.report.extremal)

    @property
    def structure_ok(self) -> bool:
        return not (self.structure_condition and self.bound_condition) or (
            self.optimum == self.plane_size and self.levels_only
        )


def solve_restricted_two_levels(q: int, k: int, l: int, workers: int = 1, node_limit: Optional[int] = None) -> TwoLevelReport:
    """{V_k, Lambda_l}-free families inside levels 1 and 2 of L(3, q), all maxima enumerated."""
    from .posets import named_poset

    if q not in (2, 3, 4):
        raise OutOfRange(f"q must be 2, 3 or 4, got {q}")
    L = build_lattice(3, q)
    forbidden = (named_poset(f"V:{k}"), named_poset(f"L:{l}"))
    # inside two adjacent levels induced and weak copies coincide
    prob = SearchProblem(L, forbidden, induced=False, dim_range=(1, 2), mode="enumerate-extremal", node_limit=node_limit)
    report = solve(prob, workers)
    return TwoLevelReport(q, k, l, report, plane_bound_condition(q, k, l), plane_structure_condition(q, k, l))
