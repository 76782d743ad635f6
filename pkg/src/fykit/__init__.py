"""Block-operator formulations of few-body lattice problems.

The package splits a few-body Hamiltonian H = H0 + Σα Vα into coupled
component equations (three-body pair components, four-body chain
components), assembles the corresponding block operators, solves lattice
bound states including hard-core interactions, and verifies every algebraic
identity involved against brute-force dense diagonalization.
"""

__version__ = "0.1.0"

from .errors import ToolkitError

__all__ = ["ToolkitError", "__version__"]
