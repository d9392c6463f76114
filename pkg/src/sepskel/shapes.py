"""Analytic test shapes: icosphere, surfaces of revolution, torus, grids.

Surfaces of revolution are built ring by ring from a (radius, height)
profile; each ring gets a vertex count proportional to its radius so that
triangles stay close to the requested edge length, and consecutive rings are
zipped together by angular order.
"""

import numpy as np

from .geom.mesh import build_mesh
from .geom.pointcloud import build_pointcloud


def icosphere(subdivisions=3, radius=1.0):
    t = (1.0 + 5**0.5) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}
        new_faces = []

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return build_mesh(radius * np.asarray(verts), np.asarray(faces))


def _resample_polyline(points, spacing):
    """Points along a polyline at roughly uniform arclength, corners kept."""
    points = np.asarray(points, dtype=float)
    out = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        n = max(1, int(round(np.linalg.norm(b - a) / spacing)))
        for s in np.arange(1, n + 1) / n:
            out.append(a + s * (b - a))
    return np.asarray(out)


def _zip_rings(ring_a, ang_a, ring_b, ang_b):
    """Triangulate the strip between two rings (vertex ids + start angles)."""
    na, nb = len(ring_a), len(ring_b)
    tris = []
    i = j = 0
    while i < na or j < nb:
        next_a = ang_a + 2 * np.pi * (i + 1) / na if na > 1 else np.inf
        next_b = ang_b + 2 * np.pi * (j + 1) / nb if nb > 1 else np.inf
        if j >= nb or (i < na and next_a < next_b):
            tris.append((ring_a[i % na], ring_a[(i + 1) % na], ring_b[j % nb]))
            i += 1
        else:
            tris.append((ring_a[i % na], ring_b[(j + 1) % nb], ring_b[j % nb]))
            j += 1
    return [t for t in tris if len(set(t)) == 3]


def revolve(profile, spacing, ring_count=None, closed=False, stagger=True):
    """Surface of revolution around the z axis.

    Parameters
    ----------
    profile : array_like, shape (K, 2)
        ``(rho, z)`` samples; endpoints with ``rho == 0`` become poles.
    spacing : float
        Target edge length around rings.
    ring_count : int, optional
        Fixed vertex count for every non-pole ring.
    closed : bool
        Treat the profile as a closed curve (no poles), e.g. a torus.
    """
    profile = np.asarray(profile, dtype=float)
    positions = []
    rings = []
    for k, (rho, z) in enumerate(profile):
        if rho < 1e-12:
            rings.append(([len(positions)], 0.0))
            positions.append((0.0, 0.0, z))
            continue
        n = ring_count or max(3, int(round(2 * np.pi * rho / spacing)))
        start = (np.pi / n) * (k % 2) if stagger else 0.0
        ang = start + 2 * np.pi * np.arange(n) / n
        ids = list(range(len(positions), len(positions) + n))
        positions.extend(zip(rho * np.cos(ang), rho * np.sin(ang), np.full(n, z)))
        rings.append((ids, start))
    faces = []
    pairs = list(zip(rings[:-1], rings[1:]))
    if closed:
        pairs.append((rings[-1], rings[0]))
    for (ra, aa), (rb, ab) in pairs:
        faces.extend(_zip_rings(ra, aa, rb, ab))
    positions = np.asarray(positions)
    faces = np.asarray(faces)
    if _signed_volume(positions, faces) < 0:
        faces = faces[:, ::-1]
    return positions, faces


def _signed_volume(positions, faces):
    p = positions[faces]
    return float(np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])).sum() / 6.0)


def cylinder(radius=1.0, height=6.0, spacing=0.15, caps=True):
    """Capped (closed) cylinder along z from 0 to ``height``."""
    n = max(3, int(round(2 * np.pi * radius / spacing)))
    h = 2 * np.pi * radius / n
    side = _resample_polyline([(radius, 0.0), (radius, height)], h)
    if caps:
        bottom = _resample_polyline([(0.0, 0.0), (radius, 0.0)], h)[:-1]
        top = _resample_polyline([(radius, height), (0.0, height)], h)[1:]
        profile = np.vstack([bottom, side, top])
    else:
        profile = side
    pos, faces = revolve(profile, h)
    return build_mesh(pos, faces)


def disk(radius=1.0, spacing=0.1):
    """Flat disk in the z = 0 plane, normals +z (has a boundary)."""
    prof = _resample_polyline([(0.0, 0.0), (radius, 0.0)], spacing)
    pos, faces = revolve(prof, spacing)
    n = np.cross(pos[faces[:, 1]] - pos[faces[:, 0]], pos[faces[:, 2]] - pos[faces[:, 0]])
    if n[:, 2].sum() < 0:
        faces = faces[:, ::-1]
    return build_mesh(pos, faces)


def cone(radius=1.0, height=2.0, spacing=0.1):
    """Closed cone: base disk at z = 0, apex at z = ``height``."""
    prof = _resample_polyline([(0.0, 0.0), (radius, 0.0), (0.0, height)], spacing)
    pos, faces = revolve(prof, spacing)
    return build_mesh(pos, faces)


def dumbbell_radius(z, half_length=3.0, bulb=1.0, neck_depth=0.6, neck_width=0.7):
    """Profile radius of :func:`dumbbell`; the neck plane is z = 0."""
    z = np.asarray(z, dtype=float)
    base = bulb * np.sqrt(np.clip(1.0 - (z / half_length) ** 2, 0.0, None))
    return base * (1.0 - neck_depth * np.exp(-(z / neck_width) ** 2))


def dumbbell(spacing=0.1, half_length=3.0, **kw):
    zs = np.linspace(-half_length, half_length, 4001)
    rho = dumbbell_radius(zs, half_length, **kw)
    curve = np.stack([rho, zs], axis=1)
    seg = np.linalg.norm(np.diff(curve, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    m = max(4, int(round(s[-1] / spacing)))
    targets = np.linspace(0, s[-1], m + 1)
    prof = np.stack([np.interp(targets, s, curve[:, 0]), np.interp(targets, s, curve[:, 1])], axis=1)
    prof[0, 0] = prof[-1, 0] = 0.0
    pos, faces = revolve(prof, spacing)
    return build_mesh(pos, faces)


def torus(major=2.0, minor=0.7, n_major=80, n_minor=48):
    """Grid torus around the z axis; tube angle measured in the (rho, z) plane."""
    phi = 2 * np.pi * np.arange(n_minor) / n_minor
    prof = np.stack([major + minor * np.cos(phi), minor * np.sin(phi)], axis=1)
    pos, faces = revolve(prof, 1.0, ring_count=n_major, closed=True)
    return build_mesh(pos, faces)


def grid(n=8, spacing=1.0, pattern="alternating"):
    """Flat ``n x n`` quad grid in z = 0.

    ``pattern="alternating"`` flips the split diagonal in a checkerboard,
    ``"diagonal"`` splits every quad along the same diagonal.
    """
    xs = np.arange(n + 1) * spacing
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pos = np.stack([X.ravel(), Y.ravel(), np.zeros(X.size)], axis=1)
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    flip = ((I + J).ravel() % 2 == 1) if pattern == "alternating" else np.zeros(a.size, bool)
    t1 = np.where(flip[:, None], np.stack([a, b, d], 1), np.stack([a, b, c], 1))
    t2 = np.where(flip[:, None], np.stack([b, c, d], 1), np.stack([a, c, d], 1))
    return build_mesh(pos, np.concatenate([t1, t2]))


def sphere_cloud(n=1000, radius=1.0, k=12, seed=0):
    """Fibonacci-lattice samples of a sphere (nearly uniform, deterministic)."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    theta = np.pi * (1 + 5**0.5) * i
    r = np.sqrt(1 - z * z)
    pts = radius * np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    return build_pointcloud(pts, k=k)


def cylinder_cloud(radius=1.0, height=6.0, spacing=0.1, k=12, caps=False):
    """Staggered ring samples of a cylinder side (optionally with cap disks)."""
    n = max(3, int(round(2 * np.pi * radius / spacing)))
    h = 2 * np.pi * radius / n
    rows = int(round(height / h))
    pts = []
    for r in range(rows + 1):
        ang = 2 * np.pi * (np.arange(n) + 0.5 * (r % 2)) / n
        pts.append(np.stack([radius * np.cos(ang), radius * np.sin(ang), np.full(n, r * height / rows)], 1))
    if caps:
        for z in (0.0, height):
            for rho in np.arange(h, radius - 0.5 * h, h)[::-1]:
                m = max(3, int(round(2 * np.pi * rho / h)))
                ang = 2 * np.pi * np.arange(m) / m
                pts.append(np.stack([rho * np.cos(ang), rho * np.sin(ang), np.full(m, z)], 1))
            pts.append(np.array([[0.0, 0.0, z]]))
    return build_pointcloud(np.vstack(pts), k=k)


def plane_cloud(n=40, spacing=0.1, k=12, jitter=0.0, seed=0):
    """Square planar patch of ``n x n`` points in z = 0."""
    rng = np.random.default_rng(seed)
    xs = np.arange(n) * spacing
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), np.zeros(X.size)], axis=1)
    if jitter:
        pts[:, :2] += rng.normal(scale=jitter * spacing, size=(len(pts), 2))
    return build_pointcloud(pts, k=k)


SHAPES = {
    "icosphere": icosphere,
    "cylinder": cylinder,
    "disk": disk,
    "cone": cone,
    "dumbbell": dumbbell,
    "torus": torus,
    "grid": grid,
}
