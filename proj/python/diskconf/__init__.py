"""Disk conformal parameterization of simply-connected open triangle meshes."""

from ._core import (
    DiskConfError,
    Mesh,
    ParseError,
    TopologyError,
    beltrami,
    harmonic_map,
    metrics,
    parameterize,
    save_with_uv,
    validate,
)

__all__ = [
    "DiskConfError",
    "Mesh",
    "ParseError",
    "TopologyError",
    "beltrami",
    "harmonic_map",
    "metrics",
    "parameterize",
    "save_with_uv",
    "validate",
]

__version__ = "0.1.0"
