"""Overlap tests between separators."""

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree

from ..geom.steiner import steiner_graph

PARALLEL_TOL = 1e-12
# slack on the segment parameters so shared endpoints hit in either order
PARAM_TOL = 1e-12


def segment_intersection_in_face(p1, p2, p3, p4):
    """Intersect two segments given by barycentric endpoints in one face.

    Only the ``u, v`` components are used (``w = 1 - u - v``), which maps
    the face affinely onto the plane.

    Returns
    -------
    (status, t1, t2, point)
        ``status`` is ``"intersection"``, ``"none"`` or ``"parallel"``.
        ``point`` is the barycentric intersection (``None`` unless it hits).
    """
    u1, v1 = p1[0], p1[1]
    u2, v2 = p2[0], p2[1]
    u3, v3 = p3[0], p3[1]
    u4, v4 = p4[0], p4[1]
    den = (u1 - u2) * (v4 - v3) - (u4 - u3) * (v1 - v2)
    if abs(den) < PARALLEL_TOL:
        return "parallel", None, None, None
    t1 = (u1 * (v4 - v3) + u3 * (v1 - v4) + u4 * (v3 - v1)) / den
    t2 = (u1 * (v2 - v3) + u2 * (v3 - v1) + u3 * (v1 - v2)) / den
    if -PARAM_TOL <= t1 <= 1.0 + PARAM_TOL and -PARAM_TOL <= t2 <= 1.0 + PARAM_TOL:
        t1, t2 = min(max(t1, 0.0), 1.0), min(max(t2, 0.0), 1.0)
        a = np.asarray(p1, dtype=float)
        pt = a + t1 * (np.asarray(p2, dtype=float) - a)
        return "intersection", t1, t2, pt
    return "none", t1, t2, None


def face_segments(domain, sep):
    if sep.face_segments is None:
        sep.face_segments = steiner_graph(domain).face_segments(sep.nodes)
    return sep.face_segments


def _segments_cross(segs_a, segs_b):
    by_face = {}
    for f, a, b in segs_b:
        by_face.setdefault(f, []).append((a, b))
    for f, a, b in segs_a:
        for c, d in by_face.get(f, ()):
            if segment_intersection_in_face(a, b, c, d)[0] == "intersection":
                return True
    return False


def _bands_touch(domain, a, b):
    """Vertex bands share a vertex or are joined by a mesh edge."""
    if np.intersect1d(a, b).size:
        return True
    return bool(np.isin(domain.graph[a].indices, b).any())


def separators_overlap(domain, s1, s2):
    """Pairwise overlap test.

    Meshes: the vertex bands share or touch, or two segments cross inside a
    common face.  Point clouds: some pair of loop points is closer than
    ``2 * mean_spacing``.
    """
    if domain.kind == "mesh":
        if _bands_touch(domain, s1.vertices, s2.vertices):
            return True
        if s1.nodes is None or s2.nodes is None:
            return False
        return _segments_cross(face_segments(domain, s1), face_segments(domain, s2))
    tree = cKDTree(s2.points[:-1])
    d, _ = tree.query(s1.points[:-1])
    return bool(np.min(d) < 2.0 * domain.mean_spacing)


def overlap_matrix(domain, separators):
    """Symmetric boolean overlap matrix with a zero diagonal."""
    n = len(separators)
    M = np.zeros((n, n), dtype=bool)
    if n < 2:
        return M
    if domain.kind == "mesh":
        rows = np.concatenate([np.full(len(s.vertices), i) for i, s in enumerate(separators)])
        cols = np.concatenate([s.vertices for s in separators])
        S = sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, domain.n_vertices))
        A = domain.graph.copy()
        A.data[:] = 1.0
        near = S @ (A + sparse.identity(domain.n_vertices, format="csr"))
        M |= (near @ S.T).toarray() > 0
        segs = [face_segments(domain, s) if s.nodes is not None else [] for s in separators]
        frows = np.concatenate([[i] * len(sg) for i, sg in enumerate(segs)] + [[]]).astype(np.int64)
        fcols = np.concatenate([[f for f, _, _ in sg] for sg in segs] + [[]]).astype(np.int64)
        Fm = sparse.csr_matrix((np.ones(len(frows)), (frows, fcols)), shape=(n, domain.n_faces))
        common = (Fm @ Fm.T).toarray() > 0
        cand = np.argwhere(np.triu(common & ~M, k=1))
        for i, j in cand:
            if _segments_cross(segs[i], segs[j]):
                M[i, j] = M[j, i] = True
    else:
        thr = 2.0 * domain.mean_spacing
        trees = [cKDTree(s.points[:-1]) for s in separators]
        lo = np.array([s.points.min(axis=0) for s in separators]) - thr
        hi = np.array([s.points.max(axis=0) for s in separators]) + thr
        for i in range(n):
            box = np.all((lo[i + 1:] <= hi[i]) & (hi[i + 1:] >= lo[i]), axis=1)
            for j in np.flatnonzero(box) + i + 1:
                if np.min(trees[j].query(separators[i].points[:-1])[0]) < thr:
                    M[i, j] = M[j, i] = True
    np.fill_diagonal(M, False)
    return M
