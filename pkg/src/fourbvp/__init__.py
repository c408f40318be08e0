"""Fast, stable solver for fourth-order linear boundary value problems.

The equation is recast as a second-kind integral equation through the
biharmonic Green's function, solved locally on uniform subintervals, glued
by a 9-diagonal matching system, and sharpened by deferred corrections with
a linear-cost operator application.
"""

from .driver import (Factorization, PiecewiseSolution, SolverOptions, evaluate,
                     factorize, solve, solve_general_bc)
from .problem import BVProblem, GeneralBC

__all__ = [
    "BVProblem",
    "GeneralBC",
    "SolverOptions",
    "Factorization",
    "PiecewiseSolution",
    "factorize",
    "solve",
    "solve_general_bc",
    "evaluate",
]

__version__ = "0.1.0"
