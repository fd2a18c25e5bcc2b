"""Weighted-region shortest paths on square and hexagonal meshes."""
from .mesh import (
    INF,
    AtCorner,
    InteriorOf,
    Mesh,
    MeshKind,
    MeshSpec,
    OnEdge,
    Outside,
    WeightField,
    build_mesh,
    locate,
    path_weighted_length,
    segment_weighted_length,
)

__all__ = [
    "INF",
    "AtCorner",
    "InteriorOf",
    "Mesh",
    "MeshKind",
    "MeshSpec",
    "OnEdge",
    "Outside",
    "WeightField",
    "build_mesh",
    "locate",
    "path_weighted_length",
    "segment_weighted_length",
]
