"""Steiner path aggregation: arborescences with few color switches."""

from .aggregation import Solution, Trace, solve
from .generators import gen_binary_tree_lower_bound, gen_planted_dag, gen_random_tree
from .heavy_path import heavy_path_decomposition, is_tree_instance, solve_tree_instance
from .instance import Arc, Instance, parse_instance, serialize_instance, simplify_walk, validate_instance
from .oracle import brute_force_opt
from .verification import check_arborescence, check_trace, switching_costs

__all__ = [
    "Arc",
    "Instance",
    "Solution",
    "Trace",
    "brute_force_opt",
    "check_arborescence",
    "check_trace",
    "gen_binary_tree_lower_bound",
    "gen_planted_dag",
    "gen_random_tree",
    "heavy_path_decomposition",
    "is_tree_instance",
    "parse_instance",
    "serialize_instance",
    "simplify_walk",
    "solve",
    "solve_tree_instance",
    "switching_costs",
    "validate_instance",
]
