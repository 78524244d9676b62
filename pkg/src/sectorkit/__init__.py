"""sectorkit: finite-dimensional nets of matrix algebras and their bimodule
categories, with exchange symmetry, statistics, presheaf functors and
conjugates, all verified numerically at explicit tolerances."""

from .linalg import DEFAULT_TOL

__all__ = ["DEFAULT_TOL"]
__version__ = "0.1.0"
