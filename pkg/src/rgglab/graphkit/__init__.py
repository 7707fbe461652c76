"""Clique, colouring and fractional colouring tools for (geometric) graphs."""

from .clique import clique_number, degeneracy_order
from .colouring import (ChromaticBounds, ColouringResult, ExactUnavailable, best_greedy,
                        chromatic_bounds, chromatic_number_exact, dsatur, greedy_clique,
                        greedy_colouring)
from .fractional import (ColumnGenerationError, FractionalSolution, dual_bound,
                         fractional_chromatic, fractional_chromatic_exhaustive,
                         max_weight_stable_set)
from .graph import Graph
from .gridlp import GridLPBudgetExceeded, GridLPResult, grid_lp_colouring
from .io import read_edges, write_edges

__all__ = [
    "ChromaticBounds", "ColouringResult", "ColumnGenerationError", "ExactUnavailable",
    "FractionalSolution", "Graph", "GridLPBudgetExceeded", "GridLPResult", "best_greedy",
    "chromatic_bounds", "chromatic_number_exact", "clique_number", "degeneracy_order",
    "dsatur", "dual_bound", "fractional_chromatic", "fractional_chromatic_exhaustive",
    "greedy_clique", "greedy_colouring", "grid_lp_colouring", "max_weight_stable_set",
    "read_edges", "write_edges",
]
