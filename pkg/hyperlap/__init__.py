"""
Green's function of the Laplace-Beltrami operator on the R-radius hyperboloid.
"""

from .data_structures import EvalResult, EvalRoute, VerificationReport  # noqa: F401
from .green_kernel import evaluate_i, fundamental_solution, fundamental_solution_rho  # noqa: F401
from .params import KernelParams  # noqa: F401
