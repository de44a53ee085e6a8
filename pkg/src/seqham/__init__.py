"""Sequentially constrained Hamilton cycles in random graphs: solvers and experiments."""

__version__ = "0.1.0"

# Expose key classes and functions for easier imports
from .graph_core import Graph, LayeredGraph, gen_gnp, gen_layered
from .ham_solver import HamCycle, brute_hamilton, posa_solve, validate_cycle
from .inversion_lab import count_inversion_bounded, greedy_low_inversion, inversions
from .ordered_subset import solve_ordered, validate_order
from .pattern_search import find_patterned

__all__ = [
    "Graph",
    "HamCycle",
    "LayeredGraph",
    "brute_hamilton",
    "count_inversion_bounded",
    "find_patterned",
    "gen_gnp",
    "gen_layered",
    "greedy_low_inversion",
    "inversions",
    "posa_solve",
    "solve_ordered",
    "validate_cycle",
    "validate_order",
]
