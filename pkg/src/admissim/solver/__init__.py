from .program import IntegerProgram, Solution, InfeasibleError, SolverTimeout
from .branch_bound import solve
from .enumerate import enumerate_optimal, TooManyBinariesError
from .backend import backend_name

__all__ = [
    "IntegerProgram", "Solution", "InfeasibleError", "SolverTimeout",
    "solve", "enumerate_optimal", "TooManyBinariesError", "backend_name",
]
