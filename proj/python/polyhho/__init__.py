"""Pressure-robust hybrid high-order Navier-Stokes solver on polygonal meshes."""

from ._core import (
    ConfigError,
    Discretization,
    MeshError,
    MeshFamily,
    Mode,
    PolyMesh,
    SolverConfig,
    SolverError,
    __version__,
    cavity,
    generate,
    kovasznay,
    load_mesh,
    proptest,
    read_mesh_string,
    robustness,
    solve,
)

__all__ = [
    "ConfigError",
    "Discretization",
    "MeshError",
    "MeshFamily",
    "Mode",
    "PolyMesh",
    "SolverConfig",
    "SolverError",
    "__version__",
    "cavity",
    "generate",
    "kovasznay",
    "load_mesh",
    "proptest",
    "read_mesh_string",
    "robustness",
    "solve",
]
