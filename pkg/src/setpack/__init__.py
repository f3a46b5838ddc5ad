"""k-Set Packing local search over improving sets of bounded size and pathwidth."""
from .core import (ConflictGraph, ImprovingSet, Packing, SetFamily, SetPackingError, apply_swap,
                   build_conflict_graph, check_packing, is_improving_set, neighborhood)
from .colorcoding import (Coloring, SearchParams, find_improving_set, pad_to_uniform,
                          search_with_coloring, trial_count)
from .instances import ParseError, gen_planted_3dm, gen_random, read_instance, write_instance
from .pathdecomp import (PathDecomposition, exact_pathwidth, make_nice, swap_pathwidth,
                         validate_decomposition)
from .solvers import (SolverConfig, exact_max_packing, greedy_maximal, local_search, solve,
                      suggested_parameters)
from .swapsearch import bruteforce_find_pw, enumerate_improving_sets

__version__ = "0.1.0"

__all__ = [
    "ConflictGraph", "ImprovingSet", "Packing", "SetFamily", "SetPackingError", "apply_swap",
    "build_conflict_graph", "check_packing", "is_improving_set", "neighborhood",
    "Coloring", "SearchParams", "find_improving_set", "pad_to_uniform", "search_with_coloring",
    "trial_count", "ParseError", "gen_planted_3dm", "gen_random", "read_instance",
    "write_instance", "PathDecomposition", "exact_pathwidth", "make_nice", "swap_pathwidth",
    "validate_decomposition", "SolverConfig", "exact_max_packing", "greedy_maximal",
    "local_search", "solve", "suggested_parameters", "bruteforce_find_pw",
    "enumerate_improving_sets",
]
