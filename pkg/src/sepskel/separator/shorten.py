"""Loop shortening under a bounding-sphere constraint.

Meshes use repeated constrained Dijkstra between rotating anchors on the
Steiner graph (edge points joined across faces).  Point-cloud loops are free polylines shortened by projected
gradient descent on a spring energy with a soft sphere penalty, projected
back onto the cloud by MLS after every step.
"""

import logging

import numpy as np
from scipy.sparse import csgraph

from ..errors import CollapseDetected, ConstraintDisconnects, DegenerateLoop
from ..geom.steiner import steiner_graph
from .loops import Separator, polyline_length
from .mls import mls_frames, mls_project

logger = logging.getLogger(__name__)

N_ANCHORS = 4
GOLDEN = 0.6180339887498949


def _clean_cycle(cyc):
    """Drop repeated nodes and back-and-forth spikes from an open cycle."""
    out = list(cyc)
    changed = True
    while changed and len(out) >= 3:
        changed = False
        res = []
        for v in out:
            if res and res[-1] == v:
                changed = True
                continue
            if len(res) >= 2 and res[-2] == v:
                res.pop()
                changed = True
                continue
            res.append(v)
        while len(res) >= 2 and res[0] == res[-1]:
            res.pop()
            changed = True
        while len(res) >= 3 and res[1] == res[-1]:
            res = res[1:-1]
            changed = True
        out = res
    return out


def _cycle_length(pos, cyc):
    return polyline_length(pos[cyc + cyc[:1]])


def _walk(pred_row, a, b):
    """Node path a -> b from a Dijkstra predecessor row."""
    path = [b]
    while path[-1] != a:
        p = pred_row[path[-1]]
        if p < 0:
            return None
        path.append(p)
    return path[::-1]


def inside_sphere(positions, center, r, tol=1e-9):
    if not np.isfinite(r):
        return np.ones(len(positions), dtype=bool)
    return np.linalg.norm(positions - center, axis=1) <= r * (1.0 + tol)


class _Constrained:
    """Steiner subgraph restricted to the bounding sphere."""

    def __init__(self, sg, center, r):
        self.pos = sg.positions
        inside = inside_sphere(sg.positions, center, r)
        self.glob = np.flatnonzero(inside)
        self.loc = np.full(sg.n_nodes, -1, dtype=np.int64)
        self.loc[self.glob] = np.arange(len(self.glob))
        self.sub = sg.graph if inside.all() else sg.graph[self.glob][:, self.glob]
        self.inside = inside

    def arcs(self, cyc, idx):
        """Current arcs between consecutive anchor positions ``idx``."""
        out = []
        for j, i0 in enumerate(idx):
            i1 = idx[(j + 1) % len(idx)]
            out.append(cyc[i0:i1 + 1] if i1 > i0 else cyc[i0:] + cyc[:i1 + 1])
        return out

    def shortest(self, anchors, limit):
        return csgraph.dijkstra(
            self.sub, directed=False, indices=self.loc[anchors], return_predecessors=True, limit=limit
        )


def _anchor_positions(n, offset):
    return sorted({(int(round(offset * n / N_ANCHORS)) + int(round(j * n / N_ANCHORS))) % n for j in range(N_ANCHORS)})


def _anchor_pass(con, cyc, offset):
    """Replace each inter-anchor arc by its constrained shortest path."""
    idx = _anchor_positions(len(cyc), offset)
    if len(idx) < 2:
        return cyc
    arcs = con.arcs(cyc, idx)
    lengths = [polyline_length(con.pos[a]) for a in arcs]
    anchors = [cyc[i] for i in idx]
    dist, pred = con.shortest(anchors, max(lengths) * (1.0 + 1e-9))
    out = []
    for j, arc in enumerate(arcs):
        b = con.loc[arc[-1]]
        if not np.isfinite(dist[j, b]) and lengths[j] > 0:
            raise ConstraintDisconnects("anchors are disconnected inside the bounding sphere")
        if dist[j, b] < lengths[j] * (1.0 - 1e-12):
            path = _walk(pred[j], con.loc[arc[0]], b)
            arc = [int(con.glob[v]) for v in path]
        out.extend(arc[:-1])
    return out


def shorten_mesh_loop(mesh, loop, source, r, max_iter=50, tol=1e-4, patience=2, steiner=2):
    """Shorten a closed vertex loop by constrained Dijkstra arc replacement.

    Paths live on the Steiner graph of the mesh, so the shortened loop may
    cross face interiors.  Each iteration places four anchors about a
    quarter of the loop apart (rotated between iterations) and replaces every
    arc between consecutive anchors by the shortest path inside the sphere.

    Parameters
    ----------
    loop : sequence of int
        Closed vertex loop (``loop[0] == loop[-1]``) or an open cycle.
    source : int
        Source vertex; the sphere of radius ``r`` is centered on it.
    r : float
        Bounding radius; ``numpy.inf`` disables the constraint.
    steiner : int
        Interior points per mesh edge.

    Raises
    ------
    ConstraintDisconnects
        The loop cannot be reconnected inside the sphere.
    DegenerateLoop
        The loop collapses to fewer than three nodes.
    """
    sg = steiner_graph(mesh, steiner)
    con = _Constrained(sg, mesh.positions[source], r)
    cyc = [int(v) for v in loop]
    if len(cyc) > 1 and cyc[0] == cyc[-1]:
        cyc = cyc[:-1]
    if not con.inside[cyc].all():
        raise ConstraintDisconnects("loop leaves the bounding sphere")

    cyc = _clean_cycle(cyc)
    if len(cyc) < 3:
        raise DegenerateLoop("loop has fewer than three nodes")
    length = _cycle_length(con.pos, cyc)
    stalls = 0
    it = 0
    for it in range(1, max_iter + 1):
        offset = (it * GOLDEN) % 1.0
        new = _clean_cycle(_anchor_pass(con, cyc, offset))
        if len(new) < 3:
            raise DegenerateLoop("loop collapsed during shortening")
        new_len = _cycle_length(con.pos, new)
        rel = (length - new_len) / length
        if new_len <= length:
            cyc, length = new, new_len
        stalls = stalls + 1 if rel < tol else 0
        if stalls >= patience:
            break
    return mesh_separator(mesh, cyc, source, r, length, it, steiner)


def cut_vertices(sg, cyc):
    """Mesh vertices to delete so that the loop splits the vertex graph.

    Vertex nodes contribute themselves, pieces running along a mesh edge the
    nearer endpoints, and pieces crossing a face interior all three corners.
    """
    mesh = sg.mesh
    nodes = list(cyc) + list(cyc[:1])
    near = sg.nearest_vertex(nodes)
    out = set(int(v) for v in near)
    for a, b in zip(nodes[:-1], nodes[1:]):
        common = np.intersect1d(sg.faces_of(a), sg.faces_of(b), assume_unique=True)
        if len(common) == 1:
            out.update(int(v) for v in mesh.faces[common[0]])
    return np.asarray(sorted(out), dtype=np.int64)


def mesh_separator(mesh, nodes, source, r, length=None, iterations=0, steiner=2):
    """Wrap a Steiner-node cycle as a :class:`Separator`."""
    sg = steiner_graph(mesh, steiner)
    cyc = [int(v) for v in nodes]
    if cyc[0] == cyc[-1]:
        cyc = cyc[:-1]
    pts = sg.positions[cyc + cyc[:1]]
    return Separator(
        points=pts,
        vertices=cut_vertices(sg, cyc),
        source=int(source),
        radius=float(r),
        length=float(polyline_length(pts) if length is None else length),
        iterations=iterations,
        nodes=np.asarray(cyc, dtype=np.int64),
    )


def arc_improvement(mesh, sep, n_anchors=N_ANCHORS, steiner=2):
    """Largest relative gain from replacing one inter-anchor arc, over all rotations.

    Used to check that a shortened loop is locally shortest.
    """
    sg = steiner_graph(mesh, steiner)
    con = _Constrained(sg, mesh.positions[sep.source], sep.radius)
    cyc = [int(v) for v in sep.nodes]
    n = len(cyc)
    step = max(1, n // n_anchors)
    dist = csgraph.dijkstra(con.sub, directed=False, indices=con.loc[cyc], limit=sep.length)
    best = 0.0
    for s in range(n):
        e = (s + step) % n
        arc = cyc[s:e + 1] if e > s else cyc[s:] + cyc[:e + 1]
        cur = polyline_length(con.pos[arc])
        best = max(best, (cur - dist[s, con.loc[cyc[e]]]) / sep.length)
    return best


# ---------------------------------------------------------------------------
# point clouds


def spring_energy(x, center, r, lam=10.0):
    """Energy of a closed polyline: sum of ``exp(s^2) - 1`` plus the sphere penalty."""
    d = np.roll(x, -1, axis=0) - x
    s2 = np.sum(d * d, axis=1)
    e = np.sum(np.expm1(s2))
    if np.isfinite(r):
        rho = np.linalg.norm(x - center, axis=1)
        e += lam * np.sum(np.maximum(0.0, rho - r) ** 2)
    return float(e)


def spring_gradient(x, center, r, lam=10.0):
    """Analytic gradient of :func:`spring_energy` with respect to ``x``."""
    d = np.roll(x, -1, axis=0) - x  # d_i = x_{i+1} - x_i
    w = 2.0 * np.exp(np.sum(d * d, axis=1))[:, None]
    g = -w * d + np.roll(w * d, 1, axis=0)
    if np.isfinite(r):
        diff = x - center
        rho = np.linalg.norm(diff, axis=1)
        over = np.maximum(0.0, rho - r)
        g += (2.0 * lam * over / np.where(rho > 0, rho, 1.0))[:, None] * diff
    return g


def resample_closed(x, spacing):
    """Uniform-arclength resampling of a closed polyline (rows are open cycle)."""
    closed = np.vstack([x, x[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    n = max(3, int(round(total / spacing)))
    t = np.arange(n) * total / n
    return np.stack([np.interp(t, s, closed[:, k]) for k in range(3)], axis=1)


def cloud_band(cloud, points):
    """Cloud points close enough to a closed polyline to cut every kNN edge across it.

    An edge crossing the loop has an endpoint within half its length of the
    loop, so the band half-width is half the longest edge near the loop.
    """
    x = np.asarray(points, dtype=np.float64)
    fine = resample_closed(x, 0.25 * cloud.mean_spacing)
    reach = float(cloud.edge_lengths.max())
    near = np.unique(np.concatenate([[]] + list(cloud.tree.query_ball_point(fine, reach))).astype(np.int64))
    e = cloud.edges
    local = np.isin(e[:, 0], near) | np.isin(e[:, 1], near)
    half = 0.5 * float(cloud.edge_lengths[local].max()) if local.any() else 0.5 * reach
    hits = cloud.tree.query_ball_point(fine, half)
    band = np.unique(np.concatenate([[]] + list(hits)).astype(np.int64))
    if band.size == 0:
        _, band = cloud.tree.query(x)
        band = np.unique(band)
    return band


def shorten_pc_loop(
    cloud,
    points,
    source,
    r,
    lam=10.0,
    max_iter=500,
    step_tol=1e-6,
    grad_tol=1e-5,
    resample_every=25,
    c_armijo=1e-4,
    length_tol=1e-4,
):
    """Shorten a closed polyline on a point cloud by projected gradient descent.

    The loop is resampled every ``resample_every`` steps; descent stops when
    the length changes by less than ``length_tol`` (relative) between two
    resamplings, or on the gradient / step tolerances.

    Raises
    ------
    CollapseDetected
        The loop ends shorter than ``3 * mean_spacing``.
    """
    h = cloud.mean_spacing
    center = cloud.positions[source]
    x = np.asarray(points, dtype=np.float64)
    if len(x) > 1 and np.allclose(x[0], x[-1]):
        x = x[:-1]
    if len(x) < 3:
        raise DegenerateLoop("point-cloud loop needs at least 3 points")
    x, normals = mls_project(cloud, resample_closed(x, h))
    energy = spring_energy(x, center, r, lam)
    alpha = 0.1
    it = 0
    last_len = polyline_length(np.vstack([x, x[:1]]))
    for it in range(1, max_iter + 1):
        g = spring_gradient(x, center, r, lam)
        g -= np.sum(g * normals, axis=1, keepdims=True) * normals
        gn2 = float(np.sum(g * g))
        if np.sqrt(gn2) < grad_tol:
            break
        alpha = min(2.0 * alpha, 1.0)
        while True:
            trial, trial_n = mls_project(cloud, x - alpha * g)
            e_trial = spring_energy(trial, center, r, lam)
            if e_trial <= energy - c_armijo * alpha * gn2:
                break
            alpha *= 0.5
            if alpha * np.sqrt(gn2) < step_tol:
                trial = None
                break
        if trial is None:
            break
        x, normals, energy = trial, trial_n, e_trial
        if it % resample_every == 0:
            x, normals = mls_project(cloud, resample_closed(x, h))
            energy = spring_energy(x, center, r, lam)
            cur = polyline_length(np.vstack([x, x[:1]]))
            if abs(last_len - cur) < length_tol * cur:
                break
            last_len = cur
    length = polyline_length(np.vstack([x, x[:1]]))
    if length < 3.0 * h:
        raise CollapseDetected(f"loop length {length:.4g} below 3 x spacing")
    return Separator(
        points=np.vstack([x, x[:1]]),
        vertices=cloud_band(cloud, x),
        source=int(source),
        radius=float(r),
        length=float(length),
        iterations=it,
    )


__all__ = [
    "shorten_mesh_loop",
    "shorten_pc_loop",
    "spring_energy",
    "spring_gradient",
    "resample_closed",
    "arc_improvement",
    "inside_sphere",
    "mls_frames",
    "mesh_separator",
    "cloud_band",
    "cut_vertices",
]
