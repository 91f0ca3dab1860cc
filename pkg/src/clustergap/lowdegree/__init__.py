"""Exact low-degree calculus for the hypercube mixture prior.

Row 0 and row 1 are the two points whose partnership ``x = 1{k_0 = k_1}`` is
the estimation target.
"""
from __future__ import annotations

from .alpha import (AlphaMatrix, GraphStats, all_alphas, count_alphas, graph_stats,
                    null_cumulant_filter, topology_conditions)
from .bounds import (BoundReport, bound_report, certified_corr_sq_upper, corr_bound_sum,
                     corr_sq_upper_bound, cumulant_bound_holds, max_even_groups,
                     moment_bound_holds, numbergroups_check, zeta_bar_n, zeta_n)
from .exhaustive import (CheckTally, check_cumulant_bounds, check_filter_exactness,
                         check_moment_bounds, check_numbergroups, grid_size)
from .moments import (EnumerationError, cross_moment, cumulant, cumulant_table_csv,
                      decode_support, encode_support, moment, parity_probability,
                      parity_probability_bruteforce)
from .oracles import empirical_mmse, mc_moment
from .scaled import ScaledRational

__all__ = [
    "AlphaMatrix", "GraphStats", "ScaledRational", "BoundReport", "EnumerationError",
    "all_alphas", "count_alphas", "graph_stats", "null_cumulant_filter", "topology_conditions",
    "parity_probability", "parity_probability_bruteforce", "moment", "cross_moment", "cumulant",
    "cumulant_table_csv", "encode_support", "decode_support",
    "moment_bound_holds", "cumulant_bound_holds", "numbergroups_check", "max_even_groups",
    "corr_bound_sum", "zeta_n", "zeta_bar_n", "corr_sq_upper_bound", "certified_corr_sq_upper",
    "bound_report", "mc_moment", "empirical_mmse",
    "CheckTally", "check_moment_bounds", "check_numbergroups", "check_cumulant_bounds",
    "check_filter_exactness", "grid_size",
]
