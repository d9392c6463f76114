"""Adaptive source sampling away from existing separators."""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph


@dataclass
class SamplerState:
    """Per-vertex distance to everything built so far, plus the RNG.

    ``d`` starts at ``inf``: before anything is built every vertex is equally
    far, which makes the first draw uniform.
    """

    d: np.ndarray
    rng: np.random.Generator
    drawn: list = field(default_factory=list)

    @classmethod
    def create(cls, n_vertices, seed=0):
        return cls(np.full(n_vertices, np.inf), np.random.default_rng(seed))


def sampling_weights(d):
    """Normalized probabilities ``p_i`` proportional to ``exp(d_i) - 1``.

    Computed as ``exp(d_i - d_max) - exp(-d_max)``, which has the same ratios
    without overflow.  Infinite entries share the mass uniformly; an all-zero
    vector falls back to uniform.
    """
    d = np.asarray(d, dtype=np.float64)
    n = len(d)
    inf = np.isposinf(d)
    if inf.any():
        return inf / inf.sum()
    d = np.maximum(np.nan_to_num(d, nan=0.0), 0.0)
    dmax = d.max() if n else 0.0
    if dmax <= 0:
        return np.full(n, 1.0 / n)
    w = np.exp(d - dmax) - np.exp(-dmax)
    w = np.maximum(w, 0.0)
    s = w.sum()
    if s <= 0:
        return np.full(n, 1.0 / n)
    return w / s


def adaptive_sample(state, size=None):
    """Draw one source (or ``size`` sources) from the frozen weights."""
    p = sampling_weights(state.d)
    if size is None:
        v = int(state.rng.choice(len(p), p=p))
        state.drawn.append(v)
        return v
    vs = [int(v) for v in state.rng.choice(len(p), size=size, p=p)]
    state.drawn.extend(vs)
    return vs


def update_sampler(state, graph, vertices):
    """Lower ``d`` to the graph distance from ``vertices``."""
    vertices = np.unique(np.asarray(vertices, dtype=np.int64))
    if vertices.size == 0:
        return state
    dist = csgraph.dijkstra(graph, directed=False, indices=vertices, min_only=True)
    np.minimum(state.d, dist, out=state.d)
    return state
