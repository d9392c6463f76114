"""Skeleton quality metrics: capsule reconstruction error, SDF histograms, W1."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from .errors import BinMismatch

DEFAULT_BINS = 64


def shape_diameter(points):
    """Largest pairwise distance of a point set (rigid-motion invariant).

    Equals the bounding-box diagonal for the corners of a box; computed on
    the convex hull vertices.
    """
    p = np.asarray(points, dtype=np.float64)
    try:
        p = p[ConvexHull(p).vertices]
    except (QhullError, ValueError):
        pass  # flat or tiny inputs: brute force on all points
    return float(np.max(pdist(p))) if len(p) > 1 else 0.0


def node_radii(domain, skeleton):
    """Mean distance from every region node to its region's vertices.

    Star centers carry no region and take the mean radius of their
    neighbors.
    """
    k = skeleton.n_nodes
    lab = skeleton.node_of_vertex
    d = np.linalg.norm(domain.positions - skeleton.positions[lab], axis=1)
    counts = np.bincount(lab, minlength=k).astype(np.float64)
    sums = np.bincount(lab, weights=d, minlength=k)
    r = np.divide(sums, counts, out=np.zeros(k), where=counts > 0)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        nb = [[] for _ in range(k)]
        for a, b in skeleton.edges:
            nb[a].append(b)
            nb[b].append(a)
        for i in empty:
            vals = [r[j] for j in nb[i] if counts[j] > 0]
            r[i] = float(np.mean(vals)) if vals else 0.0
    return r


def capsule_field(points, centers, radii, edges, chunk=4096):
    """Signed offset ``min_e (dist(p, segment_e) - r_e(t))`` of the capsule union.

    Nodes without incident edges contribute plain spheres.
    """
    p = np.atleast_2d(points)
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    lonely = np.setdiff1d(np.arange(len(centers)), edges.ravel())
    out = np.full(len(p), np.inf)
    for s in range(0, len(p), chunk):
        q = p[s:s + chunk]
        f = np.full(len(q), np.inf)
        if len(edges):
            a, b = centers[edges[:, 0]], centers[edges[:, 1]]
            ra, rb = radii[edges[:, 0]], radii[edges[:, 1]]
            ab = b - a
            L2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
            t = np.clip(np.einsum("qed,ed->qe", q[:, None, :] - a[None], ab) / L2, 0.0, 1.0)
            foot = a[None] + t[..., None] * ab[None]
            dist = np.linalg.norm(q[:, None, :] - foot, axis=2) - ((1 - t) * ra + t * rb)
            f = np.minimum(f, dist.min(axis=1))
        if len(lonely):
            dist = np.linalg.norm(q[:, None, :] - centers[lonely][None], axis=2) - radii[lonely]
            f = np.minimum(f, dist.min(axis=1))
        out[s:s + chunk] = f
    return out


def reconstruction_error(domain, skeleton, radii=None):
    """Squared offset of every vertex from the capsule-union surface.

    Returns
    -------
    per_vertex : ndarray
        ``f(p_i)^2``.
    mean : float
        Mean of ``per_vertex`` divided by the squared shape diameter.
    """
    if radii is None:
        radii = node_radii(domain, skeleton)
    f = capsule_field(domain.positions, skeleton.positions, radii, skeleton.edges)
    eps = f * f
    diag2 = shape_diameter(domain.positions) ** 2
    return eps, float(eps.mean() / diag2)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self):
        return float(self.counts.sum())

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def __len__(self):
        return len(self.counts)


def sdf_values(domain, skeleton):
    """Twice the distance from each vertex to its region's node."""
    return 2.0 * np.linalg.norm(domain.positions - skeleton.positions[skeleton.node_of_vertex], axis=1)


def sdf_histogram(domain, skeleton, bins=DEFAULT_BINS, extent=None):
    """Unit-mass SDF histogram over ``[0, extent]``.

    ``extent`` defaults to the shape diameter; pass a common value to
    compare histograms of differently sized shapes on shared bins.
    """
    diag = shape_diameter(domain.positions) if extent is None else float(extent)
    v = np.clip(sdf_values(domain, skeleton), 0.0, diag)
    counts, edges = np.histogram(v, bins=bins, range=(0.0, diag))
    counts = counts.astype(np.float64)
    return Histogram(edges, counts / counts.sum())


def wasserstein_1d(h1, h2):
    """Earth mover's distance between two histograms on identical bins."""
    if len(h1.edges) != len(h2.edges) or not np.allclose(h1.edges, h2.edges, rtol=0, atol=1e-12):
        raise BinMismatch("histograms have different bin edges")
    cdf = np.cumsum(h1.counts - h2.counts)[:-1]
    gaps = np.diff(h1.centers)
    return float(np.sum(np.abs(cdf) * gaps))


def classify_nn(query, labeled):
    """Label of the W1-nearest histogram in ``labeled`` (``(label, hist)`` pairs).

    Ties go to the earlier entry.
    """
    if not labeled:
        raise ValueError("need at least one labeled histogram")
    d = [wasserstein_1d(query, h) for _, h in labeled]
    return labeled[int(np.argmin(d))][0]
