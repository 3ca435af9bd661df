"""Recurrence coefficients of multiple orthogonal polynomials on the step-line.

The banded Hessenberg recurrence matrix for two discrete measures is
computed from nodes and weights by biorthogonal Lanczos (with or without
reorthogonalization) or by Gaussian-elimination core transformations, in
double, double-double or exact rational arithmetic.
"""

from .errors import BreakdownError, ConvergenceError, EliminationError, MopError, ValidationError
from .model import (BandedHessenberg, DiscreteSystem, Hahn, Kravchuk, StartingData, Synthetic,
                    build_system, check_normality, starting_vectors)
from .scalar import DOUBLE, EXTENDED, RATIONAL, DDArray, get_kind
from .solvers import ALGORITHMS, Solution, solve

__version__ = "0.1.0"
