"""Reading meshes / point clouds and writing OBJ / PLY artifacts."""

import os

import numpy as np
from plyfile import PlyData, PlyElement

from ..errors import UnsupportedFormat
from .mesh import build_mesh
from .pointcloud import DEFAULT_K, build_pointcloud


def read_obj(path):
    """Vertices and triangles of an OBJ file (``v`` / ``f`` records only)."""
    verts, faces = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) for tok in parts[1:]]
                if len(idx) != 3:
                    raise UnsupportedFormat(f"{path}:{lineno}: only triangles are supported")
                faces.append([i - 1 if i > 0 else len(verts) + i for i in idx])
    return np.asarray(verts, dtype=np.float64).reshape(-1, 3), np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def write_obj(path, positions, faces=None):
    with open(path, "w") as fh:
        for p in positions:
            fh.write("v %r %r %r\n" % (float(p[0]), float(p[1]), float(p[2])))
        if faces is not None:
            for f in faces:
                fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def read_ply(path):
    """Return ``(positions, faces_or_None, normals_or_None)`` from ASCII/binary PLY."""
    ply = PlyData.read(path)
    v = ply["vertex"]
    names = v.data.dtype.names
    pos = np.stack([v["x"], v["y"], v["z"]], axis=1).astype(np.float64)
    normals = None
    if all(n in names for n in ("nx", "ny", "nz")):
        normals = np.stack([v["nx"], v["ny"], v["nz"]], axis=1).astype(np.float64)
    faces = None
    if "face" in ply and ply["face"].count > 0:
        fe = ply["face"]
        key = "vertex_indices" if "vertex_indices" in fe.data.dtype.names else "vertex_index"
        rows = list(fe[key])
        if any(len(r) != 3 for r in rows):
            raise UnsupportedFormat(f"{path}: only triangle faces are supported")
        faces = np.asarray([list(r) for r in rows], dtype=np.int64).reshape(-1, 3)
    return pos, faces, normals


def read_xyz(path):
    data = np.loadtxt(path, ndmin=2)
    if data.shape[1] not in (3, 6):
        raise UnsupportedFormat(f"{path}: expected 3 or 6 columns, got {data.shape[1]}")
    normals = data[:, 3:6] if data.shape[1] == 6 else None
    return data[:, :3].astype(np.float64), normals


def load_domain(path, representation="auto", k=DEFAULT_K):
    """Load ``path`` as a Mesh or PointCloud.

    ``auto`` maps ``.obj`` to a mesh, ``.xyz`` to a point cloud and ``.ply``
    to a mesh when it carries faces, otherwise a point cloud.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".obj":
        pos, faces = read_obj(path)
        normals = None
    elif ext == ".ply":
        pos, faces, normals = read_ply(path)
    elif ext == ".xyz":
        pos, normals = read_xyz(path)
        faces = None
    else:
        raise UnsupportedFormat(f"unsupported extension {ext!r} for {path}")

    if representation == "auto":
        representation = "mesh" if faces is not None and len(faces) else "pointcloud"
    if representation == "mesh":
        if faces is None or not len(faces):
            raise UnsupportedFormat(f"{path} has no faces; cannot load as mesh")
        return build_mesh(pos, faces)
    if representation == "pointcloud":
        return build_pointcloud(pos, k=k, normals=normals)
    raise ValueError(f"unknown representation {representation!r}")


def write_polylines(path, loops):
    """Write closed polylines as OBJ ``v`` + ``l`` records."""
    with open(path, "w") as fh:
        base = 1
        for pts in loops:
            pts = np.asarray(pts)
            for p in pts:
                fh.write("v %r %r %r\n" % (float(p[0]), float(p[1]), float(p[2])))
            idx = " ".join(str(base + i) for i in range(len(pts)))
            fh.write(f"l {idx}\n")
            base += len(pts)


def write_labeled_ply(path, positions, labels, faces=None):
    """ASCII PLY with an integer ``label`` property per vertex."""
    vdata = np.empty(
        len(positions), dtype=[("x", "f8"), ("y", "f8"), ("z", "f8"), ("label", "i4")]
    )
    vdata["x"], vdata["y"], vdata["z"] = positions.T
    vdata["label"] = labels
    elements = [PlyElement.describe(vdata, "vertex")]
    if faces is not None:
        fdata = np.empty(len(faces), dtype=[("vertex_indices", "i4", (3,))])
        fdata["vertex_indices"] = faces
        elements.append(PlyElement.describe(fdata, "face"))
    PlyData(elements, text=True).write(path)


def write_field_ply(path, positions, values, faces=None):
    """Debug dump of a scalar field as PLY vertex colors (blue = low, red = high)."""
    v = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(v)
    lo, hi = (v[finite].min(), v[finite].max()) if finite.any() else (0.0, 1.0)
    s = np.where(finite, (v - lo) / (hi - lo if hi > lo else 1.0), 1.0)
    vdata = np.empty(
        len(positions),
        dtype=[("x", "f8"), ("y", "f8"), ("z", "f8"), ("red", "u1"), ("green", "u1"), ("blue", "u1")],
    )
    vdata["x"], vdata["y"], vdata["z"] = positions.T
    vdata["red"] = np.round(255 * s)
    vdata["green"] = 0
    vdata["blue"] = np.round(255 * (1 - s))
    elements = [PlyElement.describe(vdata, "vertex")]
    if faces is not None:
        fdata = np.empty(len(faces), dtype=[("vertex_indices", "i4", (3,))])
        fdata["vertex_indices"] = faces
        elements.append(PlyElement.describe(fdata, "face"))
    PlyData(elements, text=True).write(path)
