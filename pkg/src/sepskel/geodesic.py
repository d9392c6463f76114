"""Geodesic distance fields: heat method, graph Dijkstra, gradients, Voronoi labels."""

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import splu

from .errors import SolverFailure
from .geom.laplacian import gradient_operator, lumped_mass

logger = logging.getLogger(__name__)


@dataclass
class ScalarField:
    """Per-vertex distance values plus optional per-face / per-point gradients."""

    values: np.ndarray
    sources: np.ndarray
    gradients: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.values)


def _as_sources(sources):
    src = np.unique(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
    if src.size == 0:
        raise ValueError("source set is empty")
    return src


def _pinned_factor(L, labels, ncomp):
    """Factor ``L`` with the first vertex of every component pinned to zero."""
    pinned = np.array([np.flatnonzero(labels == c)[0] for c in range(ncomp)])
    free = np.setdiff1d(np.arange(L.shape[0]), pinned)
    Lr = L[free][:, free].tocsc()
    try:
        lu = splu(Lr)
    except RuntimeError as exc:
        raise SolverFailure(f"Poisson factorization failed: {exc}") from exc
    return lu, free


class HeatSolver:
    """Prefactored heat-method solver, built once per domain and reused.

    Meshes use the intrinsic Delaunay cotangent Laplacian; point clouds use
    the Gaussian kNN Laplacian with a weighted least-squares Poisson step.
    Time step is ``t = h^2`` with ``h`` the mean edge length / point spacing.
    """

    def __init__(self, domain, time_factor=1.0):
        self.domain = domain
        self.ncomp, self.labels = domain.connected_components()
        h = domain.mean_spacing
        self.t = time_factor * h * h
        L = domain.laplacian
        if domain.kind == "mesh":
            tri = domain.intrinsic
            M = lumped_mass(tri)
            self.G, self.face_area = gradient_operator(tri)
            self._GtA = (self.G.T @ sparse.diags(np.repeat(self.face_area, 2))).tocsr()
        else:
            coo = sparse.triu(L, k=1).tocoo()
            d2 = np.sum((domain.positions[coo.row] - domain.positions[coo.col]) ** 2, axis=1)
            w = -coo.data
            m = np.zeros(domain.n_vertices)
            np.add.at(m, coo.row, 0.25 * w * d2)
            np.add.at(m, coo.col, 0.25 * w * d2)
            M = sparse.diags(m)
            self._edge_i, self._edge_j, self._edge_w = coo.row, coo.col, w
            self._pgrad = pointcloud_gradient_operator(domain)
        try:
            self.heat_lu = splu((M + self.t * L).tocsc())
        except RuntimeError as exc:
            raise SolverFailure(f"heat factorization failed: {exc}") from exc
        self.poisson_lu, self.free = _pinned_factor(L.tocsr(), self.labels, self.ncomp)

    def _divergence(self, u):
        d = self.domain
        if d.kind == "mesh":
            g = (self.G @ u).reshape(-1, 2)
            n = np.linalg.norm(g, axis=1, keepdims=True)
            X = -g / np.where(n > 0, n, 1.0)
            return self._GtA @ X.ravel()
        g = (self._pgrad @ u).reshape(-1, 3)
        n = np.linalg.norm(g, axis=1, keepdims=True)
        X = -g / np.where(n > 0, n, 1.0)
        i, j, w = self._edge_i, self._edge_j, self._edge_w
        xe = 0.5 * (X[i] + X[j])
        flux = w * np.einsum("ij,ij->i", xe, d.positions[i] - d.positions[j])
        b = np.zeros(d.n_vertices)
        np.add.at(b, i, flux)
        np.add.at(b, j, -flux)
        return b

    def distance(self, sources):
        src = _as_sources(sources)
        n = self.domain.n_vertices
        delta = np.zeros(n)
        delta[src] = 1.0
        u = self.heat_lu.solve(delta)
        b = self._divergence(u)
        phi = np.zeros(n)
        phi[self.free] = self.poisson_lu.solve(b[self.free])
        if not np.all(np.isfinite(phi)):
            raise SolverFailure("non-finite distance values")
        reach = np.isin(self.labels, np.unique(self.labels[src]))
        out = np.full(n, np.inf)
        for c in np.unique(self.labels[src]):
            comp = self.labels == c
            out[comp] = phi[comp] - phi[src[self.labels[src] == c]].min()
        out[reach] = np.maximum(out[reach], 0.0)
        out[src] = 0.0
        return out


def heat_solver(domain):
    """Cached :class:`HeatSolver` of ``domain``."""
    solver = getattr(domain, "_heat_solver", None)
    if solver is None:
        solver = HeatSolver(domain)
        domain._heat_solver = solver
    return solver


def heat_distance(domain, sources, gradients=True):
    """Geodesic distance from ``sources`` by the heat method."""
    src = _as_sources(sources)
    values = heat_solver(domain).distance(src)
    f = ScalarField(values, src)
    if gradients:
        f.gradients = field_gradient(domain, f.values)
    return f


def graph_distance(domain, sources):
    """Exact shortest-path distance along edges; unreachable vertices get ``inf``."""
    src = _as_sources(sources)
    values = csgraph.dijkstra(domain.graph, directed=False, indices=src, min_only=True)
    return ScalarField(values, src)


def mesh_face_gradients(mesh, values):
    """Per-face gradient of the piecewise-linear interpolant, in the face plane."""
    p = mesh.positions[mesh.faces]
    u = values[mesh.faces]
    n = mesh.face_normals
    area2 = 2.0 * mesh.face_areas[:, None]
    g = np.zeros((mesh.n_faces, 3))
    for k in range(3):
        e = p[:, (k + 2) % 3] - p[:, (k + 1) % 3]
        g += u[:, k, None] * np.cross(n, e) / area2
    return g


def tangent_bases(normals):
    """Two orthonormal tangent vectors per normal."""
    helper = np.where(np.abs(normals[:, [0]]) < 0.9, [[1.0, 0, 0]], [[0, 1.0, 0]])
    t1 = np.cross(normals, helper)
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(normals, t1)
    return t1, t2


def pointcloud_gradient_operator(cloud):
    """Sparse (3N, N) operator: weighted least-squares tangent gradient per point."""
    cached = getattr(cloud, "_grad_op", None)
    if cached is not None:
        return cached
    pos = cloud.positions
    t1, t2 = tangent_bases(cloud.normals)
    sigma = cloud.mean_spacing
    rows, cols, vals = [], [], []
    for i in range(cloud.n_vertices):
        nb = cloud.neighbors[i]
        d = pos[nb] - pos[i]
        A = np.stack([d @ t1[i], d @ t2[i]], axis=1)
        w = np.exp(-np.sum(d * d, axis=1) / (2 * sigma * sigma))
        AtW = A.T * w
        coef = np.linalg.pinv(AtW @ A) @ AtW  # (2, k): g2 = coef @ (u_nb - u_i)
        basis = np.stack([t1[i], t2[i]], axis=1)  # (3, 2)
        c3 = basis @ coef  # (3, k)
        for r in range(3):
            rows.append(np.full(len(nb) + 1, 3 * i + r))
            cols.append(np.concatenate([nb, [i]]))
            vals.append(np.concatenate([c3[r], [-c3[r].sum()]]))
    op = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(3 * cloud.n_vertices, cloud.n_vertices),
    )
    cloud._grad_op = op
    return op


def field_gradient(domain, values):
    """Per-face (mesh) or per-point (cloud) 3D tangent gradient of ``values``."""
    values = np.asarray(values, dtype=np.float64)
    if domain.kind == "mesh":
        return mesh_face_gradients(domain, values)
    v = np.where(np.isfinite(values), values, 0.0)
    return (pointcloud_gradient_operator(domain) @ v).reshape(-1, 3)


def multi_source_voronoi(domain, site_sets):
    """Label every vertex with the index of its nearest site set.

    A single Dijkstra sweep carries ``(distance, label)`` keys, so exact ties
    resolve to the lowest site-set index.  Returns ``(labels, distances)``;
    unreachable vertices get label ``-1``.
    """
    g = domain.graph
    indptr, indices, data = g.indptr, g.indices, g.data
    n = g.shape[0]
    dist = np.full(n, np.inf)
    label = np.full(n, -1, dtype=np.int64)
    heap = []
    for lab, sites in enumerate(site_sets):
        for v in np.atleast_1d(sites):
            heap.append((0.0, lab, int(v)))
    heapq.heapify(heap)
    done = np.zeros(n, dtype=bool)
    while heap:
        d, lab, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        dist[v] = d
        label[v] = lab
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if not done[u]:
                nd = d + data[p]
                if nd < dist[u] or (nd == dist[u] and lab < label[u]):
                    dist[u] = nd
                    label[u] = lab
                    heapq.heappush(heap, (nd, lab, int(u)))
    return label, dist
