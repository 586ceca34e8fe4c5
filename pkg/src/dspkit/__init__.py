"""dspkit: exact tools for Deligne-Simpson solvability and constructions."""

__version__ = "0.1.0"

from .scalars import GaussianRational, parse_scalar, as_gaussian
from .matrices import Matrix, EpsilonSeries
from .linalg import rank, kernel_basis, solve_linear, det, inverse, charpoly, kernel_backend

__all__ = [
    "GaussianRational",
    "parse_scalar",
    "as_gaussian",
    "Matrix",
    "EpsilonSeries",
    "rank",
    "kernel_basis",
    "solve_linear",
    "det",
    "inverse",
    "charpoly",
    "kernel_backend",
    "__version__",
]
