"""Construction of one local separator from a source vertex."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..cutlocus import CutLocusParams, detect_cut_locus, incoming_directions, select_target
from ..errors import Rejection
from ..geodesic import heat_distance
from .loops import Rejected, assemble_loop, bounding_radius, trace_descent
from .shorten import shorten_mesh_loop, shorten_pc_loop

logger = logging.getLogger(__name__)


@dataclass
class SeparatorConfig:
    target_metric: str = "euclidean"
    constrained: bool = True
    cutlocus: CutLocusParams = field(default_factory=CutLocusParams)
    mesh_max_iter: int = 50
    pc_max_iter: int = 500
    penalty: float = 10.0


def approximate_loop(domain, source, config=None):
    """Closed vertex loop through the cut locus of ``source`` (before shortening)."""
    config = config or SeparatorConfig()
    f = heat_distance(domain, [source])
    cl = detect_cut_locus(domain, f, config.cutlocus)
    target = select_target(domain, cl, f, config.target_metric)
    a, b = incoming_directions(domain, f, cl, target, config.cutlocus)
    p1 = [target] + trace_descent(domain, f.values, a, f.sources)
    p2 = [target] + trace_descent(domain, f.values, b, f.sources)
    return assemble_loop(p1, p2), f, cl


def build_separator(domain, source, config=None):
    """Separator around the feature at ``source``, or a :class:`Rejected` record.

    Every sub-step failure (empty cut locus, no split, degenerate loop, ...)
    becomes a rejection carrying the error's reason; nothing is raised.
    """
    config = config or SeparatorConfig()
    source = int(source)
    try:
        loop, _, _ = approximate_loop(domain, source, config)
        pos = domain.positions[loop]
        r = bounding_radius(pos, domain.positions[source]) if config.constrained else np.inf
        if r <= 0:
            return Rejected(source, "DegenerateLoop", "zero bounding radius")
        if domain.kind == "mesh":
            sep = shorten_mesh_loop(domain, loop, source, r, max_iter=config.mesh_max_iter)
        else:
            sep = shorten_pc_loop(
                domain, pos, source, r, lam=config.penalty, max_iter=config.pc_max_iter
            )
    except Rejection as exc:
        logger.debug("source %d rejected: %s (%s)", source, exc.reason, exc)
        return Rejected(source, exc.reason, str(exc))
    return sep


def constriction_loops(domain, num_samples=64, seed=0, config=None):
    """Unconstrained loops that slide into bottlenecks, handles and tunnels.

    Each loop is scored ``1 / length``; overlapping loops are pruned keeping
    the shorter one, and loops below ``3 * mean_spacing`` are dropped.
    """
    from ..skeleton.overlap import separators_overlap

    config = config or SeparatorConfig()
    config = SeparatorConfig(**{**config.__dict__, "constrained": False})
    rng = np.random.default_rng(seed)
    sources = rng.choice(domain.n_vertices, size=min(num_samples, domain.n_vertices), replace=False)
    loops = []
    tau = 3.0 * domain.mean_spacing
    for s in sources:
        sep = build_separator(domain, int(s), config)
        if isinstance(sep, Rejected) or sep.length < tau:
            continue
        sep.score = 1.0 / sep.length
        loops.append(sep)
    loops.sort(key=lambda s: (s.length, s.source))
    kept = []
    for sep in loops:
        if not any(separators_overlap(domain, sep, k) for k in kept):
            kept.append(sep)
    return kept
