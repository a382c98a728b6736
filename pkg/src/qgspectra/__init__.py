"""Spectral theory of finite quantum group coactions at desk scale.

The package builds finite quantum groups as Hopf *-algebra data on
multi-matrix algebras, validates coactions on finite-dimensional
C*-algebras, realizes the crossed product concretely on the GNS space of
the Haar state, and computes Arveson/Connes spectra together with the
structural verdicts (primeness, simplicity, tensor closure) they govern.
"""

from .algebra import AlgElem, MultiMatrixAlgebra, matrix_algebra, tensor_algebra
from .linalg import TOL, DIM_CAP, DimensionCapExceeded
from .subspaces import (
    IdealDescriptor,
    OperatorSubspace,
    corner,
    is_essential_ideal,
    is_prime,
    is_simple,
    subspace_closure,
    wedderburn,
)

__all__ = [
    "AlgElem",
    "MultiMatrixAlgebra",
    "matrix_algebra",
    "tensor_algebra",
    "TOL",
    "DIM_CAP",
    "DimensionCapExceeded",
    "IdealDescriptor",
    "OperatorSubspace",
    "corner",
    "is_essential_ideal",
    "is_prime",
    "is_simple",
    "subspace_closure",
    "wedderburn",
]
