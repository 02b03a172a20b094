"""Exact forbidden-subposet computations in the lattice of subspaces of GF(q)^n."""

from .errors import LinlatError
from .families import Family, level_family, union_of_levels
from .gfq import make_field
from .lattice import LinearLattice, Subspace, build_lattice
from .posets import PosetSpec, named_poset, parse_forbidden
from .qarith import q_binomial, q_factorial, sigma_q
from .search import SearchProblem, SearchReport, solve

__all__ = [
    "Family",
    "LinearLattice",
    "LinlatError",
    "PosetSpec",
    "SearchProblem",
    "SearchReport",
    "Subspace",
    "build_lattice",
    "level_family",
    "make_field",
    "named_poset",
    "parse_forbidden",
    "q_binomial",
    "q_factorial",
    "sigma_q",
    "solve",
    "union_of_levels",
]

__version__ = "0.1.0"
