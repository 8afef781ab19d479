"""Integral point sets over F_q^m: field arithmetic, counting, symmetry and clique search."""

from .clique import CliqueResult, SearchConfig, build_graph, compute_I, max_clique, verify_point_set
from .counting import counts_brute, counts_closed, counts_recursive
from .ffield import GF, as_field, make_field
from .geometry import Point, is_integral, norm, sq_dist

__all__ = [
    "GF", "CliqueResult", "Point", "SearchConfig", "as_field", "build_graph", "compute_I",
    "counts_brute", "counts_closed", "counts_recursive", "is_integral", "make_field",
    "max_clique", "norm", "sq_dist", "verify_point_set",
]
