"""Numerical laboratory for ladder-operator algebras and their deformations.

Builds truncated ladder realizations of exactly solvable models, deforms
them by similarity maps into non-self-adjoint triples with biorthogonal
eigenfamilies, and verifies every algebraic identity as a machine-checkable
residual, both in exact bases and on position-space grids.
"""

from . import algebra, deform, discretize, models, specfun
from .errors import GhalabError

__version__ = "0.1.0"

__all__ = ["algebra", "specfun", "models", "deform", "discretize", "GhalabError", "__version__"]
