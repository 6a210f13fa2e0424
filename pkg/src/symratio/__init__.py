"""Exact Symanzik polynomials, exchange graphs of tree/forest pairs, and the
variation of phi/psi under bounded perturbations."""

from .homology import RationalMatrix, det
from .multigraph import Multigraph, spanning_2forests, spanning_trees
from .symanzik import MomentumAssignment, phi_det, phi_enum, psi_det, psi_enum, ratio

__all__ = [
    "Multigraph",
    "MomentumAssignment",
    "RationalMatrix",
    "det",
    "phi_det",
    "phi_enum",
    "psi_det",
    "psi_enum",
    "ratio",
    "spanning_2forests",
    "spanning_trees",
]
__version__ = "0.1.0"
