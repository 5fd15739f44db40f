"""Zeta functions of surfaces ``Z^2 = Q(X, Gamma)`` over prime fields by deformation."""

from .pencil import SurfaceInput, assumption_gate, connection_matrix
from .pipeline import RunOptions, compute, parse_manifest, run

__version__ = "0.1.0"

__all__ = ["SurfaceInput", "assumption_gate", "connection_matrix", "RunOptions", "compute",
           "parse_manifest", "run"]
