"""The linear lattice L(n, q): every subspace of GF(q)^n, in canonical RREF form.

Elements are indexed by (dimension, lexicographic RREF rows).  The order is
stored as Python-int bitmaps: ``up_strict[i]`` has bit j set iff element i is a
proper subspace of element j, ``down_strict`` is the transpose.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from .errors import AmbientMismatch, OutOfRange, TooLarge
from .gfq import FieldSpec, make_field
from .qarith import q_binomial

Row = Tuple[int, ...]
Rows = Tuple[Row, ...]

MAX_N = 6
MAX_ELEMENTS = 10 ** 6
# above this many elements the order bitmaps are computed per element on demand
EAGER_RELATION_LIMIT = 20_000


class Subspace:
    """A subspace of GF(q)^n held as its reduced row echelon basis."""

    __slots__ = ("n", "q", "rows")

    def __init__(self, n: int, q: int, rows: Rows):
        self.n = n
        self.q = q
        self.rows = rows

    @property
    def dim(self) -> int:
        return len(self.rows)

    k = dim

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.n, self.q, self.rows) == (other.n, other.q, other.rows)

    def __hash__(self) -> int:
        return hash((self.n, self.q, self.rows))

    def sort_key(self):
        return (len(self.rows), self.rows)

    def __repr__(self) -> str:
        body = ",".join("".join(_digit(x) for x in r) for r in self.rows)
        return f"Subspace(n={self.n}, q={self.q}, [{body}])"

    def to_json(self) -> list:
        return [list(r) for r in self.rows]


def _digit(x: int) -> str:
    return "0123456789abcdef"[x]


def rref(vectors: Iterable[Sequence[int]], f: FieldSpec, n: int) -> Rows:
    """Reduced row echelon form of the span of ``vectors`` (zero rows dropped)."""
    add, mul, inv, neg = f.add_table, f.mul_table, f.inv_table, f.neg_table
    m = []
    for v in vectors:
        if len(v) != n:
            raise AmbientMismatch(f"vector {tuple(v)} does not have length {n}")
        if any(not 0 <= x < f.q for x in v):
            raise OutOfRange(f"vector {tuple(v)} has entries outside GF({f.q})")
        m.append(list(v))
    top = 0
    for c in range(n):
        pr = next((r for r in range(top, len(m)) if m[r][c]), None)
        if pr is None:
            continue
        m[top], m[pr] = m[pr], m[top]
        iv = inv[m[top][c]]
        pivot_row = [mul[iv][x] for x in m[top]]
        m[top] = pivot_row
        for r in range(len(m)):
            if r != top and m[r][c]:
                factor = neg[m[r][c]]
                m[r] = [add[x][mul[factor][y]] for x, y in zip(m[r], pivot_row)]
        top += 1
        if top == len(m):
            break
    return tuple(tuple(r) for r in m[:top])


def span(vectors: Iterable[Sequence[int]], q: int, n: int | None = None) -> Subspace:
    vectors = [tuple(v) for v in vectors]
    if n is None:
        if not vectors:
            raise ValueError("n is required for an empty spanning set")
        n = len(vectors[0])
    return Subspace(n, q, rref(vectors, make_field(q), n))


def in_span(v: Sequence[int], a: Subspace, f: FieldSpec | None = None) -> bool:
    """Reduce v against a's RREF rows; True iff the residue vanishes."""
    f = f or make_field(a.q)
    add, mul, neg = f.add_table, f.mul_table, f.neg_table
    w = list(v)
    for row in a.rows:
        c = next(j for j, x in enumerate(row) if x)
        if w[c]:
            factor = neg[w[c]]
            w = [add[x][mul[factor][y]] for x, y in zip(w, row)]
    return not any(w)


def contains(a: Subspace, b: Subspace) -> bool:
    """True iff b is a subspace of a."""
    if (a.n, a.q) != (b.n, b.q):
        raise AmbientMismatch(f"cannot compare subspaces of GF({a.q})^{a.n} and GF({b.q})^{b.n}")
    if b.dim > a.dim:
        return False
    f = make_field(a.q)
    return all(in_span(r, a, f) for r in b.rows)


def orthogonal_complement(a: Subspace) -> Subspace:
    """U^perp for the standard dot product; an inclusion-reversing involution."""
    f = make_field(a.q)
    pivots = a.pivots
    basis = []
    for j in range(a.n):
        if j in pivots:
            continue
        v = [0] * a.n
        v[j] = 1
        for row, c in zip(a.rows, pivots):
            v[c] = f.neg_table[row[j]]
        basis.append(v)
    return Subspace(a.n, a.q, rref(basis, f, a.n))


def enumerate_level(n: int, k: int, f: FieldSpec) -> list[Subspace]:
    """All k-dimensional subspaces of GF(q)^n, by pivot pattern, in lexicographic row order."""
    if not 0 <= k <= n:
        raise OutOfRange(f"need 0 <= k <= n, got n={n}, k={k}")
    q = f.q
    out = []
    for pivots in combinations(range(n), k):
        pivot_set = set(pivots)
        free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivot_set]
        for values in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), x in zip(free, values):
                rows[i][j] = x
            out.append(Subspace(n, q, tuple(tuple(r) for r in rows)))
    out.sort(key=lambda s: s.rows)
    return out


def _projective_points(s: Subspace, q: int, f: FieldSpec) -> Iterator[Row]:
    """Normalized nonzero vectors of s, one per 1-dim subspace."""
    k = s.dim
    add, mul = f.add_table, f.mul_table
    for lead in range(k):
        for tail in product(range(q), repeat=k - lead - 1):
            coeffs = (1,) + tail
            v = list(s.rows[lead])
            for c, row in zip(coeffs[1:], s.rows[lead + 1:]):
                if c:
                    v = [add[x][mul[c][y]] for x, y in zip(v, row)]
            yield tuple(v)


def _int_from_bool_row(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def lattice_size(n: int, q: int) -> int:
    return sum(q_binomial(n, k, q) for k in range(n + 1))


class _LazyRelation(Sequence):
    """Order bitmaps computed per element from point masks, cached."""

    def __init__(self, lattice: "LinearLattice", upward: bool):
        self._lat = lattice
        self._up = upward
        self._cache: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._lat)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        got = self._cache.get(i)
        if got is None:
            pm = self._lat.point_masks
            mine = pm[i]
            d = self._lat.dims[i]
            offs = self._lat.level_offsets
            got = 0
            if self._up:
                for j in range(offs[d + 1], len(pm)):
                    if mine & ~pm[j] == 0:
                        got |= 1 << j
            else:
                for j in range(0, offs[d]):
                    if pm[j] & ~mine == 0:
                        got |= 1 << j
            self._cache[i] = got
        return got


class LinearLattice:
    """Full enumeration of L(n, q) with its containment order."""

    def __init__(self, n: int, q: int, max_elements: int = MAX_ELEMENTS):
        if n < 0:
            raise OutOfRange(f"n must be >= 0, got {n}")
        if n > MAX_N:
            raise TooLarge(f"n = {n} exceeds the supported maximum {MAX_N}")
        total = lattice_size(n, q)
        if total > max_elements:
            raise TooLarge(f"L({n},{q}) has {total} elements, above the guard {max_elements}")
        self.n = n
        self.q = q
        self.field = make_field(q)
        elements: list[Subspace] = []
        offsets = []
        for k in range(n + 1):
            offsets.append(len(elements))
            elements.extend(enumerate_level(n, k, self.field))
        offsets.append(len(elements))
        self.elements = elements
        self.level_offsets: Tuple[int, ...] = tuple(offsets)
        self.dims: Tuple[int, ...] = tuple(s.dim for s in elements)
        self.rank = self.dims
        self._index = {s.rows: i for i, s in enumerate(elements)}

        point_index = {s.rows[0]: j for j, s in enumerate(elements[offsets[1]:offsets[2]])} if n else {}
        self.num_points = len(point_index)
        self.point_masks: list[int] = []
        for s in elements:
            mask = 0
            for v in _projective_points(s, q, self.field):
                mask |= 1 << point_index[v]
            self.point_masks.append(mask)

        if total <= EAGER_RELATION_LIMIT:
            self.up_strict, self.down_strict = self._eager_relation()
        else:
            self.up_strict = _LazyRelation(self, upward=True)
            self.down_strict = _LazyRelation(self, upward=False)

    def _eager_relation(self) -> tuple[list[int], list[int]]:
        N, P = len(self), self.num_points
        M = np.zeros((N, max(P, 1)), dtype=np.float32)
        for i, pm in enumerate(self.point_masks):
            j = 0
            while pm:
                if pm & 1:
                    M[i, j] = 1.0
                pm >>= 1
                j += 1
        sizes = M.sum(axis=1)
        up: list[int] = []
        block = 1024
        for start in range(0, N, block):
            chunk = M[start:start + block] @ M.T
            rel = chunk == sizes[start:start + block, None]  # rel[i, j]: i <= j
            for r in range(rel.shape[0]):
                i = start + r
                rel[r, i] = False
                up.append(_int_from_bool_row(rel[r]))
        down = [0] * N
        for i, mask in enumerate(up):
            bit = 1 << i
            while mask:
                low = mask & -mask
                down[low.bit_length() - 1] |= bit
                mask ^= low
        return up, down

    # -- basic queries ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"LinearLattice(n={self.n}, q={self.q}, elements={len(self)})"

    def level(self, k: int) -> range:
        if not 0 <= k <= self.n:
            raise OutOfRange(f"dimension {k} outside 0..{self.n}")
        return range(self.level_offsets[k], self.level_offsets[k + 1])

    def level_mask(self, k: int) -> int:
        r = self.level(k)
        return ((1 << len(r)) - 1) << r.start

    def dims_mask(self, lo: int, hi: int) -> int:
        mask = 0
        for k in range(max(lo, 0), min(hi, self.n) + 1):
            mask |= self.level_mask(k)
        return mask

    @property
    def all_mask(self) -> int:
        return (1 << len(self)) - 1

    def index_of(self, s: Subspace) -> int:
        if (s.n, s.q) != (self.n, self.q):
            raise AmbientMismatch(f"{s!r} is not in L({self.n},{self.q})")
        return self._index[s.rows]

    def index_of_rows(self, rows: Iterable[Sequence[int]]) -> int:
        return self._index[rref(list(rows), self.field, self.n)]

    def dim(self, i: int) -> int:
        return self.dims[i]

    def leq(self, i: int, j: int) -> bool:
        return i == j or bool(self.up_strict[i] >> j & 1)

    def comparable(self, i: int, j: int) -> bool:
        return self.leq(i, j) or self.leq(j, i)

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return len(self) - 1

    # -- covers -----------------------------------------------------------------

    @cached_property
    def _covers(self) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
        lower: list[list[int]] = [[] for _ in range(len(self))]
        upper: list[list[int]] = [[] for _ in range(len(self))]
        for k in range(1, self.n + 1):
            lower_level = self.level_mask(k - 1)
            for i in self.level(k):
                for j in _bits(self.down_strict[i] & lower_level):
                    lower[i].append(j)
                    upper[j].append(i)
        return [tuple(x) for x in lower], [tuple(sorted(x)) for x in upper]

    def lower_shadow(self, a: int) -> tuple[int, ...]:
        """All (dim(a) - 1)-dimensional subspaces of element a."""
        if self.dims[a] < 1:
            raise OutOfRange("the zero subspace has no lower shadow")
        return self._covers[0][a]

    def upper_shadow(self, a: int) -> tuple[int, ...]:
        """All (dim(a) + 1)-dimensional superspaces of element a."""
        if self.dims[a] >= self.n:
            raise OutOfRange("the whole space has no upper shadow")
        return self._covers[1][a]

    # -- duality ----------------------------------------------------------------

    @cached_property
    def complement(self) -> Tuple[int, ...]:
        """complement[i] is the index of the orthogonal complement of element i."""
        return tuple(self.index_of(orthogonal_complement(s)) for s in self.elements)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


bits = _bits


def build_lattice(n: int, q: int, max_elements: int = MAX_ELEMENTS) -> LinearLattice:
    return _build_cached(n, q, max_elements)


_CACHE: dict[tuple[int, int, int], LinearLattice] = {}


def _build_cached(n: int, q: int, max_elements: int) -> LinearLattice:
    key = (n, q, max_elements)
    if key not in _CACHE:
        _CACHE[key] = LinearLattice(n, q, max_elements)
    return _CACHE[key]


def _mat_vec_rows(rows: Rows, g: Sequence[Sequence[int]], f: FieldSpec) -> list[list[int]]:
    add, mul = f.add_table, f.mul_table
    n = len(g)
    out = []
    for r in rows:
        v = [0] * n
        for i, x in enumerate(r):
            if x:
                gi = g[i]
                v = [add[a][mul[x][b]] for a, b in zip(v, gi)]
        out.append(v)
    return out


def general_linear_group(n: int, q: int, limit: int = 200_000) -> Iterator[Tuple[Row, ...]]:
    """Every invertible n x n matrix over GF(q), as row tuples."""
    f = make_field(q)
    if q ** (n * n) > limit:
        raise TooLarge(f"GL({n},{q}) enumeration over {q ** (n * n)} matrices exceeds {limit}")
    for entries in product(range(q), repeat=n * n):
        g = tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))
        if len(rref(g, f, n)) == n:
            yield g


def collineations(L: LinearLattice) -> list[Tuple[int, ...]]:
    """Distinct element permutations of L induced by GL(n, q) (the projective group)."""
    seen = set()
    out = []
    for g in general_linear_group(L.n, L.q):
        perm = tuple(
            L.index_of_rows(_mat_vec_rows(s.rows, g, L.field)) if s.rows else 0 for s in L.elements
        )
        if perm not in seen:
            seen.add(perm)
            out.append(perm)
    return out
