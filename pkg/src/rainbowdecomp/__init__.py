"""Rainbow decompositions of edge-coloured graphs and symbol arrays."""
from .errors import RainbowError
from .graph_core import EdgeColouredGraph, boundedness, build_graph, read_graph, write_graph
from .generators import generate
from .pattern_count import PatternGraph, count_copies, count_rainbow, parse_pattern
from .rainbow_decomp import (
    CycleConfig,
    DecompConfig,
    Decomposition,
    decompose_F_factors,
    decompose_matchings_sparse,
    decompose_near_spanning_cycles,
    decompose_transversals,
    verify_decomposition,
)

__version__ = "0.1.0"
