"""Low-dimensional l1 embeddings of tree metrics."""

from .coloring import MonotoneColoring, monotone_coloring, multiplicity
from .combiner import ScaleFamily, combine, zeta
from .embedder import (EmbedOptions, EmbedParams, EmbeddingResult, ScaleMaps, embed,
                       embed_single_tree)
from .folding import fold_halfline, fold_tree, rstar_distance
from .kary import embed_kary
from .scales import ScaleTable, build_scale_table
from .tree import RootedTree, build_tree, contract_zero_edges, parse_tree
from .verify import DistortionReport, distortion, isometric_baseline

__all__ = [
    "MonotoneColoring", "monotone_coloring", "multiplicity",
    "ScaleFamily", "combine", "zeta",
    "EmbedOptions", "EmbedParams", "EmbeddingResult", "ScaleMaps", "embed",
    "embed_single_tree",
    "fold_halfline", "fold_tree", "rstar_distance",
    "embed_kary",
    "ScaleTable", "build_scale_table",
    "RootedTree", "build_tree", "contract_zero_edges", "parse_tree",
    "DistortionReport", "distortion", "isometric_baseline",
]
