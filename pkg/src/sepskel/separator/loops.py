"""Separator records and approximate loop construction by steepest descent."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateLoop, LocalMinTrap

LIVE = "live"
PRUNED_SHORT = "prunedShort"
PRUNED_OUTSIDE = "prunedOutside"
PACKED_OUT = "packedOut"


@dataclass
class Separator:
    """A closed loop on the surface around a geometric feature.

    ``points`` is closed (first row repeated at the end).  ``vertices`` holds
    the surface vertices the loop runs through (meshes) or the cloud points
    nearest to it (point clouds).  On meshes ``nodes`` holds the Steiner
    graph nodes of the loop and ``face_segments`` optionally caches its
    ``(face, bary_start, bary_end)`` pieces.
    """

    points: np.ndarray
    vertices: np.ndarray
    source: int
    radius: float
    length: float
    score: float = 0.0
    status: str = LIVE
    face_segments: list = field(default=None, repr=False)
    iterations: int = 0
    nodes: np.ndarray = field(default=None, repr=False)

    @property
    def centroid(self):
        return self.points[:-1].mean(axis=0)

    @property
    def is_live(self):
        return self.status == LIVE


@dataclass
class Rejected:
    """Record of a source that did not yield a separator."""

    source: int
    reason: str
    message: str = ""


def polyline_length(points):
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def trace_descent(domain, values, start, sources=None, max_steps=None):
    """Greedy walk to the neighbor of minimum distance until a source is reached.

    Ties prefer a source vertex, then the lower index.

    Raises
    ------
    LocalMinTrap
        No neighbor improves on the current value before a source is reached.
    """
    values = np.asarray(values)
    if sources is None:
        sources = np.flatnonzero(values == 0)
    src = set(int(s) for s in np.atleast_1d(sources))
    path = [int(start)]
    cur = int(start)
    max_steps = max_steps or domain.n_vertices
    while cur not in src:
        nb = domain.neighbors[cur]
        if len(nb) == 0:
            raise LocalMinTrap(f"vertex {cur} has no neighbors")
        is_src = np.fromiter((int(v) not in src for v in nb), dtype=bool, count=len(nb))
        best = int(nb[np.lexsort((nb, is_src, values[nb]))[0]])
        if not (values[best] < values[cur] or best in src):
            raise LocalMinTrap(f"descent stuck at vertex {cur} (value {values[cur]:.6g})")
        path.append(best)
        cur = best
        if len(path) > max_steps:
            raise LocalMinTrap("descent did not terminate")
    return path


def assemble_loop(path1, path2):
    """Join two descent paths sharing their first vertex into a closed loop.

    Both paths start at the target.  If they meet again before the source,
    both are cut at the first shared vertex.  The result is closed
    (``loop[0] == loop[-1]``).

    Raises
    ------
    DegenerateLoop
        Fewer than three distinct vertices.
    """
    p1, p2 = list(path1), list(path2)
    if p1[0] != p2[0]:
        raise ValueError("paths must start at the same target vertex")
    if p1[0] in p1[1:] or p2[0] in p2[1:]:
        raise DegenerateLoop("descent path returns to the target")
    pos2 = {v: i for i, v in enumerate(p2)}
    cut1 = cut2 = None
    for i, v in enumerate(p1[1:], start=1):
        if v in pos2 and pos2[v] > 0:
            cut1, cut2 = i, pos2[v]
            break
    if cut1 is None:
        raise DegenerateLoop("paths do not meet")
    loop = p1[: cut1 + 1] + p2[1:cut2][::-1] + [p1[0]]
    if len(set(loop)) < 3:
        raise DegenerateLoop(f"loop has {len(set(loop))} distinct vertices")
    return loop


def bounding_radius(points, source_position):
    """Largest Euclidean distance from the source to a loop point."""
    pts = np.atleast_2d(points)
    if pts.size == 0:
        raise ValueError("empty loop")
    return float(np.max(np.linalg.norm(pts - source_position, axis=1)))
