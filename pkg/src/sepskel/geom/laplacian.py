"""Sparse Laplacians and the per-face gradient operator.

All Laplacians here use the positive semi-definite sign convention
(``L = -Δ`` weakly): off-diagonals are ``-w_ij`` and rows sum to zero.
"""

import numpy as np
from scipy import sparse

COT_CLAMP = 1e4


def corner_lengths(positions, faces):
    """Length of the edge opposite each corner, shape (F, 3)."""
    p = positions[faces]
    return np.stack(
        [
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
            np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
        ],
        axis=1,
    )


def heron_areas(lengths):
    # numerically stable Heron with sorted sides
    s = np.sort(lengths, axis=1)[:, ::-1]
    a, b, c = s[:, 0], s[:, 1], s[:, 2]
    q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(np.maximum(q, 0.0))


def corner_cotangents(lengths):
    """Cotangent of each corner angle from the opposite-edge lengths."""
    area = heron_areas(lengths)
    l2 = lengths**2
    cots = np.empty_like(lengths)
    for k in range(3):
        a2 = l2[:, (k + 1) % 3]
        b2 = l2[:, (k + 2) % 3]
        c2 = l2[:, k]
        with np.errstate(divide="ignore", invalid="ignore"):
            cots[:, k] = (a2 + b2 - c2) / (4.0 * area)
    cots = np.nan_to_num(cots, nan=0.0, posinf=COT_CLAMP, neginf=-COT_CLAMP)
    return np.clip(cots, -COT_CLAMP, COT_CLAMP)


def _lengths_of(tri):
    if hasattr(tri, "corner_lengths"):
        return tri.corner_lengths()
    return corner_lengths(tri.positions, tri.faces)


def cotan_laplacian(tri):
    """Cotangent Laplacian of a mesh or intrinsic triangulation.

    Edge ``ij`` gets weight ``(cot α + cot β) / 2`` from its two opposite
    corners (one term on the boundary).  Only edge lengths are used, so the
    same routine serves extrinsic meshes and intrinsic triangulations.
    """
    faces = tri.faces
    n = tri.n_vertices
    cots = corner_cotangents(_lengths_of(tri))
    rows, cols, vals = [], [], []
    for k in range(3):
        i = faces[:, (k + 1) % 3]
        j = faces[:, (k + 2) % 3]
        w = 0.5 * cots[:, k]
        rows += [i, j]
        cols += [j, i]
        vals += [-w, -w]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    off = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return (off + sparse.diags(diag)).tocsr()


def lumped_mass(tri):
    """Diagonal barycentric mass matrix from (possibly intrinsic) face areas."""
    area = heron_areas(_lengths_of(tri))
    m = np.zeros(tri.n_vertices)
    np.add.at(m, tri.faces.ravel(), np.repeat(area / 3.0, 3))
    return sparse.diags(m).tocsr()


def face_layouts(lengths):
    """Planar layout of each face from its edge lengths, shape (F, 3, 2)."""
    l0, l1, l2 = lengths[:, 0], lengths[:, 1], lengths[:, 2]
    p = np.zeros((len(lengths), 3, 2))
    p[:, 1, 0] = l2
    # corner 2 sits at distance l1 from corner 0 and l0 from corner 1
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (l1**2 + l2**2 - l0**2) / (2.0 * l2)
    y = np.sqrt(np.maximum(l1**2 - x**2, 0.0))
    p[:, 2, 0] = x
    p[:, 2, 1] = y
    return p


def gradient_operator(tri):
    """Sparse map from vertex values to per-face 2D gradients in face layouts.

    Returns ``(G, areas)`` with ``G`` of shape (2F, V); rows ``2f`` and
    ``2f + 1`` are the layout x/y gradient components of face ``f``.  With
    these, ``G.T @ diag(areas) @ G`` equals the cotangent Laplacian.
    """
    lengths = _lengths_of(tri)
    layout = face_layouts(lengths)
    area = heron_areas(lengths)
    faces = tri.faces
    nf = len(faces)
    rows, cols, vals = [], [], []
    for k in range(3):
        e = layout[:, (k + 2) % 3] - layout[:, (k + 1) % 3]
        g = np.stack([-e[:, 1], e[:, 0]], axis=1) / (2.0 * area[:, None])
        rows += [2 * np.arange(nf), 2 * np.arange(nf) + 1]
        cols += [faces[:, k], faces[:, k]]
        vals += [g[:, 0], g[:, 1]]
    G = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(2 * nf, tri.n_vertices),
    )
    return G, area


def gaussian_graph_laplacian(positions, edges, sigma):
    """Graph Laplacian with weights ``exp(-|xi - xj|^2 / (2 sigma^2))``.

    ``edges`` is an (E, 2) array of undirected pairs, each listed once.
    """
    n = len(positions)
    i, j = edges[:, 0], edges[:, 1]
    d2 = np.sum((positions[i] - positions[j]) ** 2, axis=1)
    w = np.exp(-d2 / (2.0 * sigma**2))
    W = sparse.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n),
    )
    deg = np.asarray(W.sum(axis=1)).ravel()
    return (sparse.diags(deg) - W).tocsr()


def pointcloud_laplacian(cloud):
    """Gaussian-weighted kNN graph Laplacian with ``sigma = cloud.mean_spacing``."""
    return gaussian_graph_laplacian(cloud.positions, cloud.edges, cloud.mean_spacing)
