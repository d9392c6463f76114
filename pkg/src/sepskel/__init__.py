"""Curve skeletons from local separators on meshes and point clouds."""

__version__ = "0.1.0"
