import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from ..errors import TooFewPoints

DEFAULT_K = 12


def pca_normals(positions, neighborhoods):
    """Smallest-variance direction of each point's neighborhood (unoriented)."""
    pts = positions[neighborhoods]
    centered = pts - pts.mean(axis=1, keepdims=True)
    cov = np.einsum("nki,nkj->nij", centered, centered)
    _, vecs = np.linalg.eigh(cov)
    n = vecs[:, :, 0]
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def orient_normals(positions, normals, graph):
    """Make normals consistent by propagation along a minimum spanning tree.

    Edge cost is ``1 - |n_i . n_j|``; each component is seeded at its highest
    point, whose normal is made to point towards +z.
    """
    normals = normals.copy()
    coo = graph.tocoo()
    cost = 1.0 - np.abs(np.sum(normals[coo.row] * normals[coo.col], axis=1)) + 1e-9
    mst = csgraph.minimum_spanning_tree(
        sparse.csr_matrix((cost, (coo.row, coo.col)), shape=graph.shape)
    )
    mst = mst + mst.T
    ncomp, labels = csgraph.connected_components(mst, directed=False)
    for c in range(ncomp):
        members = np.flatnonzero(labels == c)
        seed = int(members[np.argmax(positions[members, 2])])
        if normals[seed, 2] < 0:
            normals[seed] = -normals[seed]
        order, pred = csgraph.breadth_first_order(mst, seed, directed=False)
        for v in order[1:]:
            if np.dot(normals[v], normals[pred[v]]) < 0:
                normals[v] = -normals[v]
    return normals


class PointCloud:
    """Point samples of a surface with a symmetrized kNN neighborhood graph.

    Attributes
    ----------
    positions, normals : ndarray, shape (N, 3)
    edges : ndarray, shape (E, 2)
        Undirected kNN edges, ``i < j``, after symmetric closure.
    mean_spacing : float
        Mean distance to the nearest neighbor.
    point_areas : ndarray, shape (N,)
        Local surface area estimate ``pi * r_k^2 / (k + 1)``.
    """

    kind = "pointcloud"

    def __init__(self, positions, k=DEFAULT_K, normals=None):
        self.positions = np.ascontiguousarray(positions, dtype=np.float64)
        n = len(self.positions)
        if k < 2:
            raise ValueError("k must be at least 2")
        if n < k + 1:
            raise TooFewPoints(f"need at least {k + 1} points for k={k}, got {n}")
        self.k = k
        self.tree = cKDTree(self.positions)
        dist, idx = self.tree.query(self.positions, k=k + 1)
        self.mean_spacing = float(dist[:, 1].mean())
        self.point_areas = np.pi * dist[:, -1] ** 2 / (k + 1)

        rows = np.repeat(np.arange(n), k)
        cols = idx[:, 1:].ravel()
        lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
        keep = lo != hi
        self.edges = np.unique(np.stack([lo[keep], hi[keep]], axis=1), axis=0)
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = np.linalg.norm(self.positions[i] - self.positions[j], axis=1)
        self.edge_lengths = w
        self.graph = sparse.csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(n, n),
        )
        self.neighbors = [
            self.graph.indices[self.graph.indptr[v]:self.graph.indptr[v + 1]] for v in range(n)
        ]
        if normals is None:
            raw = pca_normals(self.positions, idx)
            self.normals = orient_normals(self.positions, raw, self.graph)
        else:
            nrm = np.asarray(normals, dtype=np.float64)
            self.normals = nrm / np.linalg.norm(nrm, axis=1, keepdims=True)
        self.is_boundary_vertex = np.zeros(n, dtype=bool)
        self._laplacian = None

    @property
    def n_vertices(self):
        return len(self.positions)

    @property
    def laplacian(self):
        if self._laplacian is None:
            from .laplacian import pointcloud_laplacian

            self._laplacian = pointcloud_laplacian(self)
        return self._laplacian

    def total_area(self):
        return float(self.point_areas.sum())

    def bbox_diagonal(self):
        return float(np.linalg.norm(np.ptp(self.positions, axis=0)))

    def connected_components(self):
        return csgraph.connected_components(self.graph, directed=False)

    def __repr__(self):
        return f"PointCloud(N={self.n_vertices}, k={self.k}, spacing={self.mean_spacing:.4g})"


def build_pointcloud(positions, k=DEFAULT_K, normals=None):
    """Build a :class:`PointCloud`; raises :class:`TooFewPoints` below ``k + 1`` points."""
    return PointCloud(positions, k=k, normals=normals)
