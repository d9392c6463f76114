"""Stage 1: local separators from sampled sources."""

from .build import SeparatorConfig, approximate_loop, build_separator, constriction_loops
from .loops import (
    LIVE,
    PACKED_OUT,
    PRUNED_OUTSIDE,
    PRUNED_SHORT,
    Rejected,
    Separator,
    assemble_loop,
    bounding_radius,
    polyline_length,
    trace_descent,
)
from .mls import mls_frames, mls_project
from .sampling import SamplerState, adaptive_sample, sampling_weights, update_sampler
from .shorten import (
    arc_improvement,
    resample_closed,
    shorten_mesh_loop,
    shorten_pc_loop,
    spring_energy,
    spring_gradient,
)

__all__ = [
    "LIVE",
    "PACKED_OUT",
    "PRUNED_OUTSIDE",
    "PRUNED_SHORT",
    "Rejected",
    "SamplerState",
    "Separator",
    "SeparatorConfig",
    "adaptive_sample",
    "approximate_loop",
    "arc_improvement",
    "assemble_loop",
    "bounding_radius",
    "build_separator",
    "constriction_loops",
    "mls_frames",
    "mls_project",
    "polyline_length",
    "resample_closed",
    "sampling_weights",
    "shorten_mesh_loop",
    "shorten_pc_loop",
    "spring_energy",
    "spring_gradient",
    "trace_descent",
    "update_sampler",
]
