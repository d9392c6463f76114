"""Separator scoring and pruning."""

import numpy as np
from scipy.sparse import csgraph

from ..separator.loops import LIVE, PRUNED_OUTSIDE, PRUNED_SHORT


def balance_score(a1, a2, length):
    """``A_small / (A_large * length)``; argument order of the areas is irrelevant."""
    lo, hi = min(a1, a2), max(a1, a2)
    if hi <= 0 or length <= 0:
        return 0.0
    return float(lo / (hi * length))


def split_areas(domain, sep):
    """Areas of the components left inside the bounding sphere once the
    separator's vertices are removed, largest first."""
    pos = domain.positions
    if np.isfinite(sep.radius):
        inside = np.linalg.norm(pos - pos[sep.source], axis=1) <= sep.radius * (1.0 + 1e-4)
    else:
        inside = np.ones(domain.n_vertices, dtype=bool)
    inside[sep.vertices] = False
    idx = np.flatnonzero(inside)
    if idx.size == 0:
        return np.zeros(0)
    n, lab = csgraph.connected_components(domain.graph[idx][:, idx], directed=False)
    areas = np.bincount(lab, weights=domain.point_areas[idx], minlength=n)
    return np.sort(areas)[::-1]


def score_separator(domain, sep):
    """Balance of the two largest sides divided by loop length; 0 without a split."""
    areas = split_areas(domain, sep)
    if len(areas) < 2:
        return 0.0
    return balance_score(areas[1], areas[0], sep.length)


def winding_number(mesh, points):
    """Generalized winding number of query points with respect to a triangle mesh."""
    q = np.atleast_2d(points)
    tri = mesh.positions[mesh.faces]
    out = np.zeros(len(q))
    for i, p in enumerate(q):
        a, b, c = tri[:, 0] - p, tri[:, 1] - p, tri[:, 2] - p
        la, lb, lc = (np.linalg.norm(v, axis=1) for v in (a, b, c))
        num = np.einsum("ij,ij->i", a, np.cross(b, c))
        den = (
            la * lb * lc
            + np.einsum("ij,ij->i", a, b) * lc
            + np.einsum("ij,ij->i", a, c) * lb
            + np.einsum("ij,ij->i", b, c) * la
        )
        out[i] = np.sum(2.0 * np.arctan2(num, den)) / (4.0 * np.pi)
    return out


def is_inside(domain, points):
    """Inside test: winding number >= 0.5 (meshes), or behind the nearest
    point's normal (point clouds)."""
    pts = np.atleast_2d(points)
    if domain.kind == "mesh":
        return winding_number(domain, pts) >= 0.5
    _, nn = domain.tree.query(pts)
    d = np.sum((pts - domain.positions[nn]) * domain.normals[nn], axis=1)
    return d <= 0.0


def prune_separators(domain, separators):
    """Mark short loops and loops centred outside the shape; returns the input list."""
    tau = 3.0 * domain.mean_spacing
    live = [s for s in separators if s.status == LIVE]
    for s in live:
        if s.length < tau:
            s.status = PRUNED_SHORT
    live = [s for s in live if s.status == LIVE]
    if live:
        inside = is_inside(domain, np.array([s.centroid for s in live]))
        for s, ok in zip(live, inside):
            if not ok:
                s.status = PRUNED_OUTSIDE
    return separators
