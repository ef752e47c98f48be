"""Exact dyadic constructions of compact subsets of the line and their proper ranks."""

from .analyzer import (
    RankReport,
    brute_force_rank,
    check_ball_n_proper_budgeted,
    distance_right_ce,
    max_rank,
    proper_rank_of_point,
    rank_report,
    rho,
)
from .constructions import (
    construct_G,
    construct_H,
    construct_K,
    construct_Km,
    realize,
    staged,
    symbolic_G,
    symbolic_H,
    symbolic_K,
    symbolic_Km,
)
from .intervals import Ball, Interval, IntervalSet, hausdorff_distance
from .numerics import INFINITY, Dyadic, dyadic
from .oracles import OracleSpec, TargetSet, build_oracle_for_target, empty_oracle, full_oracle

__all__ = [
    "INFINITY",
    "Ball",
    "Dyadic",
    "Interval",
    "IntervalSet",
    "OracleSpec",
    "RankReport",
    "TargetSet",
    "brute_force_rank",
    "build_oracle_for_target",
    "check_ball_n_proper_budgeted",
    "construct_G",
    "construct_H",
    "construct_K",
    "construct_Km",
    "distance_right_ce",
    "dyadic",
    "empty_oracle",
    "full_oracle",
    "hausdorff_distance",
    "max_rank",
    "proper_rank_of_point",
    "rank_report",
    "realize",
    "rho",
    "staged",
    "symbolic_G",
    "symbolic_H",
    "symbolic_K",
    "symbolic_Km",
]
