"""Stage 2: scoring, pruning, packing and skeleton graph assembly."""

from .graph import (
    SkeletonGraph,
    build_skeleton,
    cliques_to_stars,
    find_triangles,
    maximal_cliques,
    region_labels,
)
from .overlap import overlap_matrix, segment_intersection_in_face, separators_overlap
from .packing import brute_force_pack, greedy_pack, is_maximal, is_packing, normalized_weights
from .score import (
    balance_score,
    is_inside,
    prune_separators,
    score_separator,
    split_areas,
    winding_number,
)

__all__ = [
    "SkeletonGraph",
    "balance_score",
    "brute_force_pack",
    "build_skeleton",
    "cliques_to_stars",
    "find_triangles",
    "greedy_pack",
    "is_inside",
    "is_maximal",
    "is_packing",
    "maximal_cliques",
    "normalized_weights",
    "overlap_matrix",
    "prune_separators",
    "region_labels",
    "score_separator",
    "segment_intersection_in_face",
    "separators_overlap",
    "split_areas",
    "winding_number",
]
