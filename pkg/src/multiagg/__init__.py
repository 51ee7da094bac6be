"""Multi-source aggregation over shortest-path structures in a simulated CONGEST network.

Builds the leveled graphs (or single-parent trees) of many roots at once
with ID-priority pipelining, aggregates values along them, and uses that
to approximate betweenness and closeness centrality and low routing-cost
trees. Sequential oracles for every result live in :mod:`multiagg.oracle`.
"""

__version__ = "0.1.0"

from .aggregators import max_aggregate, sum_aggregate
from .approx import ApproxCount, ApproxRatio, approx_add
from .centrality import bc_dependencies, bc_setup, cc_approx, estimate_diameters
from .congest import Message, RoundTrace, SimConfig, bits_of, run
from .framework import Aggregator, DlgState, dlg_agr, dlg_comp, tree_agr, tree_comp
from .graph import (Graph, compute_metrics, gen_barbell, gen_diamond_chain, gen_lowerbound_chain,
                    gen_random_connected, load_graph, parse_graph, save_graph)
from .mrct import mrct, mrct_rand

__all__ = [
    "ApproxCount", "ApproxRatio", "Aggregator", "DlgState", "Graph", "Message", "RoundTrace",
    "SimConfig", "approx_add", "bc_dependencies", "bc_setup", "bits_of", "cc_approx",
    "compute_metrics", "dlg_agr", "dlg_comp", "estimate_diameters", "gen_barbell",
    "gen_diamond_chain", "gen_lowerbound_chain", "gen_random_connected", "load_graph",
    "max_aggregate", "mrct", "mrct_rand", "parse_graph", "run", "save_graph", "sum_aggregate",
    "tree_agr", "tree_comp",
]
