import numpy as np
import pytest
from scipy.sparse import csgraph

from sepskel import shapes


@pytest.fixture(scope="session")
def ico4():
    return shapes.icosphere(4)


@pytest.fixture(scope="session")
def ico3():
    return shapes.icosphere(3)


@pytest.fixture(scope="session")
def cylinder():
    return shapes.cylinder()


@pytest.fixture(scope="session")
def torus():
    return shapes.torus()


@pytest.fixture(scope="session")
def cone():
    return shapes.cone()


@pytest.fixture(scope="session")
def disk():
    return shapes.disk()


@pytest.fixture(scope="session")
def dumbbell():
    return shapes.dumbbell()


@pytest.fixture(scope="session")
def cylinder_cloud():
    return shapes.cylinder_cloud()


@pytest.fixture(scope="session")
def plane():
    return shapes.plane_cloud()


def nearest(domain, point):
    return int(np.argmin(np.linalg.norm(domain.positions - np.asarray(point), axis=1)))


def ring_vertices(mesh, z):
    """Vertices of the revolved ring closest to height ``z``, sorted by angle."""
    p = mesh.positions
    zs = np.unique(np.round(p[:, 2], 9))
    z0 = zs[np.argmin(np.abs(zs - z))]
    ring = np.flatnonzero(np.abs(p[:, 2] - z0) < 1e-9)
    return ring[np.argsort(np.arctan2(p[ring, 1], p[ring, 0]))]


def zigzag_loop(mesh, z0=3.0, amp=0.3, n=12):
    """Closed vertex loop visiting waypoints that alternate above / below ``z0``."""
    p = mesh.positions
    a = 2 * np.pi * np.arange(n) / n
    way = np.stack([np.cos(a), np.sin(a), z0 + amp * (-1.0) ** np.arange(n)], axis=1)
    ids = [nearest(mesh, w) for w in way]
    loop = []
    for i in range(n):
        _, pred = csgraph.dijkstra(mesh.graph, indices=ids[i], return_predecessors=True)
        path = [ids[(i + 1) % n]]
        while path[-1] != ids[i]:
            path.append(int(pred[path[-1]]))
        loop += path[::-1][:-1]
    return loop + [loop[0]]


def perturbed_circle(n=63, z0=3.0):
    a = 2 * np.pi * np.arange(n) / n
    z = z0 + 0.05 * (-1.0) ** np.arange(n) + 0.1 * np.sin(2 * a)
    return np.stack([np.cos(a), np.sin(a), z], axis=1)


def tube_winding(points, major=2.0):
    """Signed number of turns of a closed polyline around the torus tube."""
    rho = np.hypot(points[:, 0], points[:, 1])
    ang = np.unwrap(np.arctan2(points[:, 2], rho - major))
    return (ang[-1] - ang[0]) / (2 * np.pi)


def make_skeleton(positions, edges, node_of_vertex):
    """Hand-built skeleton whose regions are given per vertex."""
    from sepskel.skeleton import SkeletonGraph

    positions = np.asarray(positions, dtype=float)
    k = len(positions)
    lab = np.asarray(node_of_vertex, dtype=np.int64)
    return SkeletonGraph(
        positions=positions,
        edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
        region_of_vertex=lab,
        node_of_vertex=lab,
        region_vertices=np.bincount(lab, minlength=k),
        region_areas=np.zeros(k),
        is_star=np.zeros(k, dtype=bool),
    )


def axis_skeleton(mesh, offset=(0.0, 0.0)):
    """One node per distinct vertex height on the z axis (shifted by ``offset``),
    chained in order; every vertex belongs to the node at its height."""
    z = np.round(mesh.positions[:, 2], 9)
    zs, lab = np.unique(z, return_inverse=True)
    pos = np.column_stack([np.full(len(zs), offset[0]), np.full(len(zs), offset[1]), zs])
    edges = np.stack([np.arange(len(zs) - 1), np.arange(1, len(zs))], axis=1)
    return make_skeleton(pos, edges, lab)


def ot_lp(h1, h2):
    """Optimal transport cost between two histograms by linear programming."""
    from scipy.optimize import linprog

    c = h1.centers
    n = len(c)
    cost = np.abs(c[:, None] - c[None, :]).ravel()
    rows = np.zeros((2 * n, n * n))
    for i in range(n):
        rows[i, i * n:(i + 1) * n] = 1
        rows[n + i, i::n] = 1
    res = linprog(cost, A_eq=rows, b_eq=np.r_[h1.counts, h2.counts], bounds=(0, None), method="highs")
    return float(res.fun)


def seg_dist(p, a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    ab = b - a
    t = np.clip(((p - a) @ ab) / (ab @ ab), 0, 1)
    return np.linalg.norm(p - (a + t[..., None] * ab), axis=-1)


def humanoid(step=0.06):
    """Closed humanoid-like mesh: a smooth union of capsules meshed by marching cubes."""
    from skimage.measure import marching_cubes

    from sepskel.geom import build_mesh

    parts = [  # (a, b, radius)
        ((0, 0, 0.0), (0, 0, 1.2), 0.35),      # torso
        ((0, 0, 1.55), (0, 0, 1.75), 0.22),    # head
        ((0, 0, 1.05), (1.2, 0, 0.6), 0.12),   # arms
        ((0, 0, 1.05), (-1.2, 0, 0.6), 0.12),
        ((0.15, 0, 0.0), (0.35, 0, -1.4), 0.15),  # legs
        ((-0.15, 0, 0.0), (-0.35, 0, -1.4), 0.15),
    ]
    lo, hi = np.array([-1.5, -0.6, -1.7]), np.array([1.5, 0.6, 2.1])
    axes = [np.arange(a, b + step, step) for a, b in zip(lo, hi)]
    g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    k = 0.08  # smooth-min blend
    d = None
    for a, b, r in parts:
        di = seg_dist(g, a, b) - r
        if d is None:
            d = di
        else:
            h = np.clip(0.5 + 0.5 * (di - d) / k, 0, 1)
            d = di * (1 - h) + d * h - k * h * (1 - h)
    verts, faces, _, _ = marching_cubes(d, 0.0, spacing=(step,) * 3)
    verts = verts + lo
    # drop slivers from marching cubes and unreferenced vertices
    e = verts[faces]
    area = 0.5 * np.linalg.norm(np.cross(e[:, 1] - e[:, 0], e[:, 2] - e[:, 0]), axis=1)
    faces = faces[area > 1e-10 * step**2]
    used, inv = np.unique(faces, return_inverse=True)
    return build_mesh(verts[used], inv.reshape(-1, 3))
