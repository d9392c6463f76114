"""End-to-end skeletonization: sample separators, then pack them into a graph."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cutlocus import CutLocusParams
from .geodesic import heat_solver
from .geom.io import write_labeled_ply
from .geom.steiner import steiner_graph
from .separator import (
    PACKED_OUT,
    Rejected,
    SamplerState,
    SeparatorConfig,
    adaptive_sample,
    build_separator,
    update_sampler,
)
from .separator.loops import LIVE
from .skeleton import build_skeleton, greedy_pack, overlap_matrix, prune_separators, score_separator

logger = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    num_separators: int = 1024
    seed: int = 0
    batch_size: int = 16
    threads: int = 1
    target_metric: str = "euclidean"
    laplacian_percentile: float = 90.0
    gradient_angle: float = 60.0
    opposite_angle: float = 120.0
    min_region: int = 3

    def separator_config(self):
        return SeparatorConfig(
            target_metric=self.target_metric,
            cutlocus=CutLocusParams(
                laplacian_percentile=self.laplacian_percentile,
                gradient_angle=self.gradient_angle,
                opposite_angle=self.opposite_angle,
            ),
        )


@dataclass
class PipelineResult:
    skeleton: object
    separators: list
    rejections: list
    selected: list
    timings: dict = field(default_factory=dict)

    def rejection_counts(self):
        out = {}
        for r in self.rejections:
            out[r.reason] = out.get(r.reason, 0) + 1
        return dict(sorted(out.items()))


def _warm_caches(domain):
    """Build lazily cached structures before worker threads share the domain."""
    heat_solver(domain)
    _ = domain.graph, domain.neighbors, domain.normals
    if domain.kind == "mesh":
        steiner_graph(domain)
        _ = domain.face_normals, domain.vertex_normals


def sample_separators(domain, config):
    """Stage 1: draw sources in batches and build one separator per source.

    Sources of a batch are drawn from the same frozen weights; sampler
    updates are then applied sequentially in batch order, so the result only
    depends on the seed and the batch size.
    """
    _warm_caches(domain)
    state = SamplerState.create(domain.n_vertices, config.seed)
    sep_cfg = config.separator_config()
    separators, rejections = [], []
    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        drawn = 0
        while drawn < config.num_separators:
            b = min(config.batch_size, config.num_separators - drawn)
            sources = adaptive_sample(state, size=b)
            drawn += b
            if pool is None:
                results = [build_separator(domain, s, sep_cfg) for s in sources]
            else:
                results = list(pool.map(lambda s: build_separator(domain, s, sep_cfg), sources))
            for s, res in zip(sources, results):
                if isinstance(res, Rejected):
                    rejections.append(res)
                    update_sampler(state, domain.graph, [s])
                else:
                    separators.append(res)
                    update_sampler(state, domain.graph, np.append(res.vertices, s))
            logger.debug("drawn %d, built %d, rejected %d", drawn, len(separators), len(rejections))
    finally:
        if pool is not None:
            pool.shutdown()
    return separators, rejections


def pack_separators(domain, separators):
    """Stage 2 selection: score, prune, and greedily pack; returns the selected list."""
    for s in separators:
        if s.status == LIVE:
            s.score = score_separator(domain, s)
    # two-sided splits only
    live = [s for s in separators if s.status == LIVE and s.score > 0]
    prune_separators(domain, live)
    live = [s for s in live if s.status == LIVE]
    if not live:
        return []
    M = overlap_matrix(domain, live)
    chosen = greedy_pack([s.score for s in live], M)
    chosen_set = set(chosen)
    for i, s in enumerate(live):
        if i not in chosen_set:
            s.status = PACKED_OUT
    return [live[i] for i in sorted(chosen)]


def run_pipeline(domain, config=None):
    config = config or PipelineConfig()
    t0 = time.perf_counter()
    separators, rejections = sample_separators(domain, config)
    t1 = time.perf_counter()
    selected = pack_separators(domain, separators)
    skel = build_skeleton(domain, selected, config.min_region)
    t2 = time.perf_counter()
    result = PipelineResult(
        skel, separators, rejections, selected, {"stage1": t1 - t0, "stage2": t2 - t1, "total": t2 - t0}
    )
    logger.info("stage 1: %.2fs, %d separators, rejections %s", t1 - t0, len(separators), result.rejection_counts())
    logger.info(
        "stage 2: %.2fs, %d selected, skeleton %d nodes / %d edges",
        t2 - t1, len(selected), skel.n_nodes, skel.n_edges,
    )
    return result


def export_segmentation(domain, skeleton, path):
    """PLY with the region node of every vertex as an integer ``label`` property."""
    faces = domain.faces if domain.kind == "mesh" else None
    write_labeled_ply(path, domain.positions, skeleton.node_of_vertex, faces)
    return path
