"""Exact computations with the theta formalism for bi-Hamiltonian pencils of
hydrodynamic type: the pencil differentials, local functionals, homotopy
operators, truncated cohomology and deformations."""

from .coeffs import CoeffField, CoeffRat, LambdaCoeff
from .algebra import ThetaElement, LambdaElement, SuperDerivation

__all__ = ["CoeffField", "CoeffRat", "LambdaCoeff", "ThetaElement", "LambdaElement", "SuperDerivation"]

__version__ = "0.1.0"
