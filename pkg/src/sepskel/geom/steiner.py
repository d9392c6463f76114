"""Steiner-point graph for approximate geodesic paths across faces.

Each mesh edge gets ``m`` evenly spaced interior points; inside every face
all of its nodes (three corners plus ``3m`` edge points) are connected by
straight segments.  Shortest paths in this graph are polylines that cross
face interiors and approximate surface geodesics far better than paths
restricted to mesh edges.

Node ids ``0 .. V-1`` are the mesh vertices; the points of edge ``e`` are
``V + e*m + j`` for ``j = 0 .. m-1``, ordered from ``edges[e, 0]``.
"""

import numpy as np
from scipy import sparse


class SteinerGraph:
    """Steiner graph of a :class:`~sepskel.geom.mesh.Mesh`.

    Attributes
    ----------
    positions : ndarray, shape (V + E*m, 3)
    graph : scipy.sparse.csr_matrix
        Symmetric Euclidean edge weights.
    face_nodes : ndarray, shape (F, 3 + 3m)
        Node ids of every face in a fixed slot layout.
    slot_bary : ndarray, shape (3 + 3m, 3)
        Barycentric coordinates of each slot in its face.
    """

    def __init__(self, mesh, m=2):
        self.mesh = mesh
        self.m = int(m)
        V, E, F = mesh.n_vertices, mesh.n_edges, mesh.n_faces
        m = self.m
        ts = np.arange(1, m + 1) / (m + 1)
        a, b = mesh.positions[mesh.edges[:, 0]], mesh.positions[mesh.edges[:, 1]]
        steiner = a[:, None, :] + ts[None, :, None] * (b - a)[:, None, :]
        self.positions = np.vstack([mesh.positions, steiner.reshape(-1, 3)])
        self.n_nodes = V + E * m

        slots = [mesh.faces[:, 0], mesh.faces[:, 1], mesh.faces[:, 2]]
        bary = [np.eye(3)[k] for k in range(3)]
        for k in range(3):
            h = 3 * np.arange(F) + k
            e = mesh.he_edge[h]
            forward = mesh.edges[e, 0] == mesh.faces[:, k]
            for j in range(m):
                jj = np.where(forward, j, m - 1 - j)
                slots.append(V + e * m + jj)
                s = ts[j]
                w = np.zeros(3)
                w[k], w[(k + 1) % 3] = 1.0 - s, s
                bary.append(w)
        self.face_nodes = np.stack(slots, axis=1).astype(np.int64)
        self.slot_bary = np.asarray(bary)

        ns = self.face_nodes.shape[1]
        iu, ju = np.triu_indices(ns, k=1)
        u = self.face_nodes[:, iu].ravel()
        v = self.face_nodes[:, ju].ravel()
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = np.unique(lo * self.n_nodes + hi)
        lo, hi = key // self.n_nodes, key % self.n_nodes
        w = np.linalg.norm(self.positions[lo] - self.positions[hi], axis=1)
        g = sparse.coo_matrix((w, (lo, hi)), shape=(self.n_nodes, self.n_nodes))
        self.graph = (g + g.T).tocsr()

        self.node_faces = sparse.csr_matrix(
            (
                np.ones(self.face_nodes.size, dtype=np.int8),
                (self.face_nodes.ravel(), np.repeat(np.arange(F), ns)),
            ),
            shape=(self.n_nodes, F),
        )
        self.node_faces.sum_duplicates()

    def nearest_vertex(self, nodes):
        """Mesh vertex closest to each node (vertex nodes map to themselves)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        V, m = self.mesh.n_vertices, self.m
        out = nodes.copy()
        st = nodes >= V
        e, j = np.divmod(nodes[st] - V, m)
        first = (j + 1) / (m + 1) <= 0.5
        out[st] = np.where(first, self.mesh.edges[e, 0], self.mesh.edges[e, 1])
        return out

    def faces_of(self, node):
        return self.node_faces.indices[self.node_faces.indptr[node]:self.node_faces.indptr[node + 1]]

    def barycentric(self, face, node):
        slot = int(np.flatnonzero(self.face_nodes[face] == node)[0])
        return self.slot_bary[slot]

    def face_segments(self, nodes):
        """``(face, bary_a, bary_b)`` for each consecutive node pair of a closed loop.

        Pairs lying along a mesh edge are reported in both adjacent faces.
        """
        nodes = list(nodes)
        if nodes[0] != nodes[-1]:
            nodes = nodes + nodes[:1]
        out = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            common = np.intersect1d(self.faces_of(a), self.faces_of(b), assume_unique=True)
            for f in common:
                out.append((int(f), self.barycentric(f, a), self.barycentric(f, b)))
        return out


def steiner_graph(mesh, m=2):
    """Cached :class:`SteinerGraph` of ``mesh``."""
    cache = mesh.__dict__.setdefault("_steiner", {})
    if m not in cache:
        cache[m] = SteinerGraph(mesh, m)
    return cache[m]
