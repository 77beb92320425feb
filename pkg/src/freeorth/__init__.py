"""Representation-category numerics for the free orthogonal quantum groups ``O_n^+``.

Exact Temperley-Lieb diagrams and Jones-Wenzl idempotents, an orthonormal
tower for the irreducibles ``H_k``, fusion isometries with their norms,
Haar pairings of coefficients, and numerical checks of the decay bounds
and deformation identities built on them.
"""

__version__ = "0.1.0"

from .errors import DegeneracyError, FreeOrthError, ResourceError, ShapeError
from .fusion import CoefficientAlgebra, FusionTable, haar_pair, norm_formula
from .qnum import QContext, chebyshev, dim_h, psi_eigenvalue, psi_eigenvalue_exact
from .rep import IsometryTower, build_tower, diagram_to_matrix, get_tower
from .tl import Pairing, TLElement, compose, jones_wenzl, markov_trace, parse_element, tensor

__all__ = [
    "__version__",
    "CoefficientAlgebra",
    "DegeneracyError",
    "FreeOrthError",
    "FusionTable",
    "IsometryTower",
    "Pairing",
    "QContext",
    "ResourceError",
    "ShapeError",
    "TLElement",
    "build_tower",
    "chebyshev",
    "compose",
    "diagram_to_matrix",
    "dim_h",
    "get_tower",
    "haar_pair",
    "jones_wenzl",
    "markov_trace",
    "norm_formula",
    "parse_element",
    "psi_eigenvalue",
    "psi_eigenvalue_exact",
    "tensor",
]
