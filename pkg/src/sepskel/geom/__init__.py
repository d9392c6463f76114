"""Geometric domains: halfedge meshes, kNN point clouds and their operators."""

from .intrinsic import IntrinsicTriangulation, intrinsic_delaunay
from .io import load_domain, read_obj, read_ply, read_xyz, write_obj
from .laplacian import (
    cotan_laplacian,
    gaussian_graph_laplacian,
    gradient_operator,
    lumped_mass,
    pointcloud_laplacian,
)
from .mesh import Mesh, build_mesh
from .pointcloud import PointCloud, build_pointcloud

__all__ = [
    "IntrinsicTriangulation",
    "Mesh",
    "PointCloud",
    "build_mesh",
    "build_pointcloud",
    "cotan_laplacian",
    "gaussian_graph_laplacian",
    "gradient_operator",
    "intrinsic_delaunay",
    "load_domain",
    "lumped_mass",
    "pointcloud_laplacian",
    "read_obj",
    "read_ply",
    "read_xyz",
    "write_obj",
]
