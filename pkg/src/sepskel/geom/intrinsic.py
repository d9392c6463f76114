"""Intrinsic Delaunay triangulation by edge flipping.

Only edge lengths are tracked.  Connectivity uses the same implicit halfedge
layout as :class:`~sepskel.geom.mesh.Mesh` (``3*f + k`` from corner ``k`` to
corner ``k + 1``), rewritten in place whenever an edge is flipped.
"""

from collections import deque

import numpy as np

from ..errors import FlipLimitExceeded
from .laplacian import heron_areas

DELAUNAY_EPS = 1e-8


def _angle(opposite, a, b):
    """Angle opposite side ``opposite`` in a triangle with sides a, b."""
    c = (a * a + b * b - opposite * opposite) / (2.0 * a * b)
    return np.arccos(min(1.0, max(-1.0, c)))


def _unfolded_diagonal(l_ab, l_bc, l_ca, l_ad, l_db):
    """Length c-d after laying out triangles (a, b, c) and (b, a, d) on either side of ab."""
    xc = (l_ca**2 + l_ab**2 - l_bc**2) / (2.0 * l_ab)
    yc = np.sqrt(max(l_ca**2 - xc**2, 0.0))
    xd = (l_ad**2 + l_ab**2 - l_db**2) / (2.0 * l_ab)
    yd = -np.sqrt(max(l_ad**2 - xd**2, 0.0))
    return float(np.hypot(xc - xd, yc - yd))


class IntrinsicTriangulation:
    """Edge-length triangulation over the vertices of a mesh.

    Attributes
    ----------
    faces : ndarray, shape (F, 3)
    twin, he_edge : ndarray, shape (3F,)
    edge_lengths : ndarray, shape (E,)
    flip_count : int
    """

    def __init__(self, mesh):
        self.n_vertices = mesh.n_vertices
        self.faces = mesh.faces.copy()
        self.twin = mesh.twin.copy()
        self.he_edge = mesh.he_edge.copy()
        self.edge_lengths = mesh.edge_lengths.copy()
        self.flip_count = 0

    @property
    def n_faces(self):
        return len(self.faces)

    def corner_lengths(self):
        he = self.he_edge.reshape(-1, 3)
        return self.edge_lengths[he[:, [1, 2, 0]]]

    def face_areas(self):
        return heron_areas(self.corner_lengths())

    def total_area(self):
        return float(self.face_areas().sum())

    @staticmethod
    def _next(h):
        return h - h % 3 + (h % 3 + 1) % 3

    @staticmethod
    def _prev(h):
        return h - h % 3 + (h % 3 + 2) % 3

    def _tail(self, h):
        return self.faces[h // 3, h % 3]

    def opposite_angle_sum(self, h):
        """Sum of the two angles opposite interior halfedge ``h``'s edge."""
        t = self.twin[h]
        L = self.edge_lengths
        e = L[self.he_edge[h]]
        a1 = _angle(e, L[self.he_edge[self._next(h)]], L[self.he_edge[self._prev(h)]])
        a2 = _angle(e, L[self.he_edge[self._next(t)]], L[self.he_edge[self._prev(t)]])
        return a1 + a2

    def is_delaunay_edge(self, h, eps=DELAUNAY_EPS):
        if self.twin[h] < 0:
            return True
        return self.opposite_angle_sum(h) <= np.pi + eps

    def flip(self, h):
        """Flip the interior edge of halfedge ``h``.  Returns False if not flippable."""
        t = int(self.twin[h])
        if t < 0:
            return False
        h1, h2 = self._next(h), self._prev(h)
        t1, t2 = self._next(t), self._prev(t)
        a = self._tail(h)
        b = self._tail(h1)
        c = self._tail(h2)
        d = self._tail(t2)
        if c == d:
            return False
        L = self.edge_lengths
        e = self.he_edge[h]
        e_bc, e_ca, e_ad, e_db = (self.he_edge[x] for x in (h1, h2, t1, t2))
        tw_bc, tw_ca, tw_ad, tw_db = (self.twin[x] for x in (h1, h2, t1, t2))
        new_len = _unfolded_diagonal(L[e], L[e_bc], L[e_ca], L[e_ad], L[e_db])

        f0, f1 = h // 3, t // 3
        self.faces[f0] = (a, d, c)
        self.faces[f1] = (d, b, c)
        slots = {
            3 * f0 + 0: (e_ad, tw_ad),
            3 * f0 + 1: (e, 3 * f1 + 2),
            3 * f0 + 2: (e_ca, tw_ca),
            3 * f1 + 0: (e_db, tw_db),
            3 * f1 + 1: (e_bc, tw_bc),
            3 * f1 + 2: (e, 3 * f0 + 1),
        }
        for slot, (edge, tw) in slots.items():
            self.he_edge[slot] = edge
            self.twin[slot] = tw
            if tw >= 0 and (tw // 3) not in (f0, f1):
                self.twin[tw] = slot
        L[e] = new_len
        self.flip_count += 1
        return True

    def edge_halfedge(self):
        """One halfedge per undirected edge."""
        rep = np.full(len(self.edge_lengths), -1, dtype=np.int64)
        rep[self.he_edge[::-1]] = np.arange(len(self.he_edge))[::-1]
        return rep

    def delaunay_violations(self, eps=DELAUNAY_EPS):
        rep = self.edge_halfedge()
        return [int(h) for h in rep if not self.is_delaunay_edge(h, eps)]


def intrinsic_delaunay(mesh, eps=DELAUNAY_EPS, max_flips=None):
    """Flip edges until every interior edge has opposite angle sum ``<= pi + eps``.

    Raises
    ------
    FlipLimitExceeded
        If more than ``max_flips`` (default ``100 * E``) flips are needed.
    """
    tri = IntrinsicTriangulation(mesh)
    if max_flips is None:
        max_flips = 100 * max(len(tri.edge_lengths), 1)
    rep = tri.edge_halfedge()
    queue = deque(int(e) for e in range(len(rep)))
    queued = np.ones(len(rep), dtype=bool)
    while queue:
        e = queue.popleft()
        queued[e] = False
        # find a current halfedge of edge e
        hs = np.flatnonzero(tri.he_edge == e) if rep[e] < 0 or tri.he_edge[rep[e]] != e else [rep[e]]
        h = int(hs[0])
        rep[e] = h
        if tri.is_delaunay_edge(h, eps):
            continue
        if not tri.flip(h):
            continue
        if tri.flip_count > max_flips:
            raise FlipLimitExceeded(f"more than {max_flips} flips")
        f0, f1 = h // 3, int(tri.twin[h]) // 3
        for f in (f0, f1):
            for k in range(3):
                slot = 3 * f + k
                ne = int(tri.he_edge[slot])
                rep[ne] = slot
                if ne != e and not queued[ne]:
                    queued[ne] = True
                    queue.append(ne)
    return tri
