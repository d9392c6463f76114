"""Moving-least-squares plane projection onto a point cloud."""

import numpy as np

from ..errors import NoSupport


def mls_frames(cloud, points, k=None):
    """Weighted PCA plane ``(centroid, normal)`` of the k nearest cloud points.

    Weights are Gaussian with bandwidth ``2 * mean_spacing``.  Normals are
    oriented to agree with the nearest cloud point's normal.

    Raises
    ------
    NoSupport
        A query lies farther than ``10 * mean_spacing`` from every point.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    k = min(k or cloud.k, cloud.n_vertices)
    h = cloud.mean_spacing
    dist, idx = cloud.tree.query(pts, k=k)
    dist = dist.reshape(len(pts), k)
    idx = idx.reshape(len(pts), k)
    far = dist[:, 0] > 10.0 * h
    if far.any():
        q = int(np.flatnonzero(far)[0])
        raise NoSupport(f"query {pts[q]} has no cloud point within {10.0 * h:.4g}")
    bw = 2.0 * h
    w = np.exp(-((dist / bw) ** 2))
    w /= w.sum(axis=1, keepdims=True)
    nb = cloud.positions[idx]
    c = np.einsum("nk,nkd->nd", w, nb)
    d = nb - c[:, None, :]
    cov = np.einsum("nk,nki,nkj->nij", w, d, d)
    _, vecs = np.linalg.eigh(cov)
    n = vecs[:, :, 0]
    ref = cloud.normals[idx[:, 0]]
    n *= np.where(np.sum(n * ref, axis=1, keepdims=True) < 0, -1.0, 1.0)
    return c, n


def mls_project(cloud, points, iterations=2):
    """Project points onto the local MLS plane of the cloud.

    The plane is refit around the projected point ``iterations`` times; the
    returned points lie exactly on the last fitted plane.

    Returns
    -------
    projected : ndarray, shape (n, 3)
    normals : ndarray, shape (n, 3)
    """
    x = np.atleast_2d(np.asarray(points, dtype=np.float64)).copy()
    n = None
    for _ in range(max(1, iterations)):
        c, n = mls_frames(cloud, x)
        x = x - np.sum((x - c) * n, axis=1, keepdims=True) * n
    return x, n
