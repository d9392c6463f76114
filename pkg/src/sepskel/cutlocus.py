"""Cut-locus detection on distance fields and target / direction selection.

A vertex is marked when the distance function has a ridge there: its
discrete Laplacian (PSD convention, so ridges are positive) exceeds a
relative threshold and nearby gradients disagree by more than an angle
threshold after being transported into a common tangent plane.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import EmptyCutLocus, NoSplitFound


@dataclass
class CutLocusParams:
    laplacian_percentile: float = 90.0
    gradient_angle: float = 60.0  # degrees
    opposite_angle: float = 120.0  # degrees, opposing-gradient pair test
    min_component_size: int = 3


@dataclass
class CutLocusGraph:
    """Marked vertices with their induced edges and spanning forest."""

    marked: np.ndarray
    edges: np.ndarray
    components: np.ndarray  # component label per marked vertex
    laplacian: np.ndarray = field(repr=False)  # per-vertex Laplacian of D
    forest: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.marked)

    def mask(self, n):
        m = np.zeros(n, dtype=bool)
        m[self.marked] = True
        return m


def _rotate_between(v, n_from, n_to):
    """Rotate tangent vectors ``v`` by the minimal rotation taking ``n_from`` to ``n_to``."""
    axis = np.cross(n_from, n_to)
    s = np.linalg.norm(axis, axis=1, keepdims=True)
    c = np.sum(n_from * n_to, axis=1, keepdims=True)
    k = axis / np.where(s > 1e-15, s, 1.0)
    # Rodrigues with sin = s, cos = c
    kv = np.cross(k, v)
    kdot = np.sum(k * v, axis=1, keepdims=True)
    return v * c + kv * s + k * kdot * (1.0 - c)


def _mesh_pairs(mesh):
    """All (vertex, face_a, face_b) pairs of distinct faces around each vertex."""
    cached = getattr(mesh, "_vf_pairs", None)
    if cached is not None:
        return cached
    vf = sparse.csr_matrix(
        (np.ones(3 * mesh.n_faces), (mesh.faces.ravel(), np.repeat(np.arange(mesh.n_faces), 3))),
        shape=(mesh.n_vertices, mesh.n_faces),
    )
    vs, fa, fb = [], [], []
    for v in range(mesh.n_vertices):
        fs = vf.indices[vf.indptr[v]:vf.indptr[v + 1]]
        a, b = np.triu_indices(len(fs), k=1)
        vs.append(np.full(len(a), v))
        fa.append(fs[a])
        fb.append(fs[b])
    pairs = (np.concatenate(vs), np.concatenate(fa), np.concatenate(fb))
    mesh._vf_pairs = pairs
    return pairs


def _cloud_pairs(cloud):
    """All (point, neighbor_a, neighbor_b) triples over each kNN neighborhood."""
    cached = getattr(cloud, "_nn_pairs", None)
    if cached is not None:
        return cached
    vs, pa, pb = [], [], []
    for v, nb in enumerate(cloud.neighbors):
        nb = np.concatenate([[v], nb])
        a, b = np.triu_indices(len(nb), k=1)
        vs.append(np.full(len(a), v))
        pa.append(nb[a])
        pb.append(nb[b])
    pairs = (np.concatenate(vs), np.concatenate(pa), np.concatenate(pb))
    cloud._nn_pairs = pairs
    return pairs


def gradient_deviation(domain, gradients):
    """Per-vertex maximum angle (radians) between nearby transported gradients."""
    g = gradients / np.maximum(np.linalg.norm(gradients, axis=1, keepdims=True), 1e-300)
    if domain.kind == "mesh":
        v, a, b = _mesh_pairs(domain)
        normals = domain.face_normals
    else:
        v, a, b = _cloud_pairs(domain)
        normals = domain.normals
    ga = _rotate_between(g[a], normals[a], normals[b])
    cos = np.clip(np.sum(ga * g[b], axis=1), -1.0, 1.0)
    valid = (np.linalg.norm(gradients[a], axis=1) > 0) & (np.linalg.norm(gradients[b], axis=1) > 0)
    ang = np.where(valid, np.arccos(cos), 0.0)
    out = np.zeros(domain.n_vertices)
    np.maximum.at(out, v, ang)
    return out


def distance_laplacian(domain, values):
    """Per-vertex ``(L D)_i / A_i`` with the PSD Laplacian; ridges come out positive."""
    v = np.where(np.isfinite(values), values, 0.0)
    return (domain.laplacian @ v) / domain.point_areas


def detect_cut_locus(domain, field, params=None):
    """Mark the cut locus of ``field``'s sources as a connected subgraph.

    Raises
    ------
    EmptyCutLocus
        No vertex passes both tests (or only tiny components survive).
    """
    params = params or CutLocusParams()
    n = domain.n_vertices
    lap = distance_laplacian(domain, field.values)
    positive = lap[lap > 0]
    if positive.size == 0:
        raise EmptyCutLocus("distance Laplacian has no positive values")
    theta_l = np.percentile(positive, params.laplacian_percentile)
    dev = gradient_deviation(domain, field.gradients)
    cand = (lap > theta_l) & (dev > np.deg2rad(params.gradient_angle))
    cand &= np.isfinite(field.values)
    cand &= ~domain.is_boundary_vertex
    src = field.sources
    cand[src] = False
    for s in src:
        cand[domain.neighbors[s]] = False

    marked = np.flatnonzero(cand)
    if marked.size == 0:
        raise EmptyCutLocus("no vertex passes both ridge tests")
    sub = domain.graph[marked][:, marked]
    ncomp, comp = csgraph.connected_components(sub, directed=False)
    sizes = np.bincount(comp, minlength=ncomp)
    keep = sizes[comp] >= params.min_component_size
    marked = marked[keep]
    if marked.size == 0:
        raise EmptyCutLocus("only components below the minimum size")
    sub = domain.graph[marked][:, marked]
    ncomp, comp = csgraph.connected_components(sub, directed=False)
    coo = sparse.triu(sub, k=1).tocoo()
    edges = np.stack([marked[coo.row], marked[coo.col]], axis=1)
    forest = csgraph.minimum_spanning_tree(sub).tocoo()
    forest_edges = np.stack([marked[forest.row], marked[forest.col]], axis=1)
    return CutLocusGraph(marked, edges, comp, lap, forest_edges)


def select_target(domain, cutlocus, field, metric="euclidean"):
    """Marked vertex nearest to the source (Euclidean or geodesic)."""
    marked = cutlocus.marked
    if metric == "euclidean":
        src = domain.positions[field.sources]
        d = np.min(
            np.linalg.norm(domain.positions[marked][:, None, :] - src[None, :, :], axis=2), axis=1
        )
    elif metric == "geodesic":
        d = field.values[marked]
    else:
        raise ValueError(f"unknown target metric {metric!r}")
    return int(marked[np.argmin(d)])


def vertex_gradients(mesh, face_gradients):
    """Area-weighted average of incident face gradients, projected to vertex normals."""
    g = np.zeros((mesh.n_vertices, 3))
    wg = face_gradients * mesh.face_areas[:, None]
    for k in range(3):
        np.add.at(g, mesh.faces[:, k], wg)
    n = mesh.vertex_normals
    return g - np.sum(g * n, axis=1, keepdims=True) * n


def _mesh_directions(mesh, values, mask, target):
    ring = mesh.one_ring(target)
    if len(ring) == 0:
        raise NoSplitFound("isolated vertex")
    free = ~mask[ring]
    if free.all() or not free.any():
        raise NoSplitFound("one-ring is not separated by the cut locus")
    # rotate so the ring starts right after a marked neighbor, then split into arcs
    start = int(np.flatnonzero(~free)[0])
    ring = np.roll(ring, -start - 1)
    free = np.roll(free, -start - 1)
    arcs, cur = [], []
    for v, f in zip(ring, free):
        if f:
            cur.append(int(v))
        elif cur:
            arcs.append(cur)
            cur = []
    if cur:
        arcs.append(cur)
    if len(arcs) < 2:
        raise NoSplitFound("one-ring has a single unmarked arc")
    best = []
    for arc in arcs:
        arc = np.asarray(arc)
        key = np.lexsort((arc, values[arc]))
        best.append(int(arc[key[0]]))
    best = np.asarray(best)
    order = np.lexsort((best, values[best]))
    v1, v2 = best[order[0]], best[order[1]]
    return (int(min(v1, v2)), int(max(v1, v2))) if values[v1] == values[v2] else (int(v1), int(v2))


def _opposing_pair(domain, gradients, mask, target, opposite_angle):
    """Unmarked neighbors of ``target`` whose gradients point most nearly apart."""
    nb = np.asarray([v for v in domain.neighbors[target] if not mask[v]])
    if len(nb) < 2:
        raise NoSplitFound("fewer than two unmarked neighbors")
    g = gradients[nb]
    g = g / np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    # bring every neighbor gradient into the target's tangent plane
    normals = domain.normals
    g = _rotate_between(g, normals[nb], np.repeat(normals[[target]], len(nb), axis=0))
    dots = g @ g.T
    iu, ju = np.triu_indices(len(nb), k=1)
    d = dots[iu, ju]
    ok = d < np.cos(np.deg2rad(opposite_angle))
    if not ok.any():
        raise NoSplitFound("no neighbor pair with opposing gradients")
    cand = np.flatnonzero(ok)
    pick = cand[np.lexsort((nb[ju[cand]], nb[iu[cand]], d[cand]))[0]]
    return int(nb[iu[pick]]), int(nb[ju[pick]])


def incoming_directions(domain, field, cutlocus, target, params=None):
    """Two start vertices on opposite sides of the cut locus at ``target``.

    Raises
    ------
    NoSplitFound
        The target's neighborhood is not split by the marked set.
    """
    params = params or CutLocusParams()
    mask = cutlocus.mask(domain.n_vertices)
    if domain.kind == "mesh":
        try:
            return _mesh_directions(domain, field.values, mask, target)
        except NoSplitFound:
            # fragmented cut locus: fall back to opposing vertex gradients
            vg = vertex_gradients(domain, field.gradients)
            return _opposing_pair(domain, vg, mask, target, params.opposite_angle)
    return _opposing_pair(domain, field.gradients, mask, target, params.opposite_angle)
