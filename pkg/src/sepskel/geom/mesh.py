"""Halfedge triangle mesh.

Halfedge ``3*f + k`` runs from ``faces[f, k]`` to ``faces[f, (k + 1) % 3]``,
so ``next`` is implicit and only the twin map is stored.  Boundary halfedges
have twin ``-1``.
"""

import logging

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from ..errors import DegenerateFace, NonManifoldEdge

logger = logging.getLogger(__name__)

# relative to squared bounding-box diagonal
_DEGENERATE_AREA_TOL = 1e-14


def triangle_areas(positions, faces):
    """Unsigned area of every triangle."""
    p0, p1, p2 = (positions[faces[:, k]] for k in range(3))
    return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)


class Mesh:
    """Closed or bounded manifold triangle mesh with halfedge connectivity.

    Parameters
    ----------
    positions : array_like, shape (V, 3)
        Vertex coordinates.
    faces : array_like, shape (F, 3)
        Vertex indices of each triangle, consistently oriented.

    Attributes
    ----------
    twin : ndarray, shape (3F,)
        Opposite halfedge, ``-1`` on the boundary.
    edges : ndarray, shape (E, 2)
        Undirected edges with ``edges[:, 0] < edges[:, 1]``.
    he_edge : ndarray, shape (3F,)
        Undirected edge id of each halfedge.
    face_areas, dual_areas : ndarray
        Triangle areas and barycentric (one third) vertex areas.
    """

    kind = "mesh"

    def __init__(self, positions, faces):
        self.positions = np.ascontiguousarray(positions, dtype=np.float64)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must have shape (V, 3)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ValueError("faces must have shape (F, 3)")
        nv = len(self.positions)
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= nv):
            raise ValueError("face index out of range")
        if np.any(self.faces[:, 0] == self.faces[:, 1]) or np.any(
            self.faces[:, 1] == self.faces[:, 2]
        ) or np.any(self.faces[:, 0] == self.faces[:, 2]):
            raise DegenerateFace("face with repeated vertex")

        self.face_areas = triangle_areas(self.positions, self.faces)
        diag2 = float(np.sum(np.ptp(self.positions, axis=0) ** 2)) if nv else 0.0
        bad = np.flatnonzero(self.face_areas <= _DEGENERATE_AREA_TOL * diag2)
        if len(bad):
            raise DegenerateFace(f"{len(bad)} zero-area faces, first is face {bad[0]}")

        self._build_connectivity()

        dual = np.zeros(nv)
        np.add.at(dual, self.faces.ravel(), np.repeat(self.face_areas / 3.0, 3))
        self.dual_areas = dual

        n = np.cross(
            self.positions[self.faces[:, 1]] - self.positions[self.faces[:, 0]],
            self.positions[self.faces[:, 2]] - self.positions[self.faces[:, 0]],
        )
        self.face_normals = n / np.linalg.norm(n, axis=1, keepdims=True)
        vn = np.zeros((nv, 3))
        for k in range(3):
            np.add.at(vn, self.faces[:, k], n)
        norms = np.linalg.norm(vn, axis=1, keepdims=True)
        self.vertex_normals = vn / np.where(norms > 0, norms, 1.0)

        self._laplacian = None
        self._graph = None
        self._neighbors = None

    # -- construction -------------------------------------------------------
    def _build_connectivity(self):
        nv = len(self.positions)
        tail = self.faces.ravel()
        head = self.faces[:, [1, 2, 0]].ravel()
        key = tail * nv + head
        order = np.argsort(key, kind="stable")
        sorted_key = key[order]
        dup = np.flatnonzero(sorted_key[1:] == sorted_key[:-1])
        if len(dup):
            h = order[dup[0]]
            raise NonManifoldEdge(
                f"edge ({tail[h]}, {head[h]}) appears twice with the same orientation"
            )
        lo = np.minimum(tail, head)
        hi = np.maximum(tail, head)
        ukey = lo * nv + hi
        uniq, he_edge, counts = np.unique(ukey, return_inverse=True, return_counts=True)
        if np.any(counts > 2):
            e = uniq[np.argmax(counts > 2)]
            raise NonManifoldEdge(f"edge ({e // nv}, {e % nv}) has more than two faces")

        rkey = head * nv + tail
        pos = np.searchsorted(sorted_key, rkey)
        pos = np.minimum(pos, len(sorted_key) - 1)
        found = sorted_key[pos] == rkey
        self.twin = np.where(found, order[pos], -1)
        self.he_tail = tail
        self.he_head = head
        self.he_edge = he_edge.ravel()
        self.edges = np.stack([uniq // nv, uniq % nv], axis=1)
        boundary = np.zeros(nv, dtype=bool)
        boundary[tail[self.twin < 0]] = True
        boundary[head[self.twin < 0]] = True
        self.is_boundary_vertex = boundary
        self.edge_lengths = np.linalg.norm(
            self.positions[self.edges[:, 0]] - self.positions[self.edges[:, 1]], axis=1
        )

    # -- basic queries ------------------------------------------------------
    @property
    def n_vertices(self):
        return len(self.positions)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_edges(self):
        return len(self.edges)

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def is_closed(self):
        return bool(np.all(self.twin >= 0))

    @staticmethod
    def next_halfedge(h):
        return h - h % 3 + (h % 3 + 1) % 3

    @staticmethod
    def prev_halfedge(h):
        return h - h % 3 + (h % 3 + 2) % 3

    @property
    def mean_spacing(self):
        """Mean edge length; the length scale used throughout the pipeline."""
        return float(self.edge_lengths.mean())

    @property
    def point_areas(self):
        return self.dual_areas

    @property
    def normals(self):
        return self.vertex_normals

    def total_area(self):
        return float(self.face_areas.sum())

    def bbox_diagonal(self):
        return float(np.linalg.norm(np.ptp(self.positions, axis=0)))

    @property
    def graph(self):
        """Symmetric sparse adjacency weighted by Euclidean edge length."""
        if self._graph is None:
            n = self.n_vertices
            i, j = self.edges[:, 0], self.edges[:, 1]
            w = self.edge_lengths
            self._graph = sparse.csr_matrix(
                (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
                shape=(n, n),
            )
        return self._graph

    @property
    def neighbors(self):
        """Per-vertex sorted neighbor index arrays (CSR slices of the graph)."""
        if self._neighbors is None:
            g = self.graph
            self._neighbors = [g.indices[g.indptr[v]:g.indptr[v + 1]] for v in range(g.shape[0])]
        return self._neighbors

    @property
    def laplacian(self):
        """Cotangent Laplacian of the intrinsic Delaunay triangulation (cached)."""
        if self._laplacian is None:
            from .intrinsic import intrinsic_delaunay
            from .laplacian import cotan_laplacian

            self._intrinsic = intrinsic_delaunay(self)
            self._laplacian = cotan_laplacian(self._intrinsic)
        return self._laplacian

    @property
    def intrinsic(self):
        self.laplacian
        return self._intrinsic

    def connected_components(self):
        return csgraph.connected_components(self.graph, directed=False)

    def one_ring(self, v):
        """Neighbors of ``v`` in cyclic (counter-clockwise) order.

        For boundary vertices the fan is returned open, from one boundary
        neighbor to the other.
        """
        out = np.flatnonzero(self.he_tail == v) if not hasattr(self, "_out_he") else self._out_he[v]
        if len(out) == 0:
            return np.empty(0, dtype=np.int64)
        h = int(out[0])
        # rewind to the first outgoing halfedge of an open fan
        start = h
        while True:
            t = self.twin[h]
            if t < 0:
                break
            h = self.next_halfedge(int(t))
            if h == start:
                break
        ring = []
        first = h
        while True:
            ring.append(int(self.he_head[h]))
            p = self.prev_halfedge(h)
            t = self.twin[p]
            if t < 0:
                ring.append(int(self.he_tail[p]))
                break
            h = int(t)
            if h == first:
                break
        return np.asarray(ring, dtype=np.int64)

    def outgoing_index(self):
        """Cache the outgoing halfedges of every vertex (used by ``one_ring``)."""
        if not hasattr(self, "_out_he"):
            order = np.argsort(self.he_tail, kind="stable")
            split = np.searchsorted(self.he_tail[order], np.arange(self.n_vertices + 1))
            self._out_he = [order[split[v]:split[v + 1]] for v in range(self.n_vertices)]
        return self._out_he

    def export(self):
        """Return ``(positions, faces)`` copies; ``build_mesh`` round-trips them."""
        return self.positions.copy(), self.faces.copy()

    def __repr__(self):
        return f"Mesh(V={self.n_vertices}, E={self.n_edges}, F={self.n_faces})"


def build_mesh(positions, faces):
    """Validate input arrays and build a :class:`Mesh`."""
    mesh = Mesh(positions, faces)
    mesh.outgoing_index()
    logger.debug("built %r", mesh)
    return mesh
