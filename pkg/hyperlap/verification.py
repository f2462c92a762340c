"""
Numerical checks that the kernel is a fundamental solution on H_R^d:
harmonicity away from the pole, unit flux through geodesic spheres,
Euclidean singularity matching and decay at infinity.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence

from .data_structures import EvalRoute, VerificationReport
from .green_kernel import auto_route, euclidean_green, fundamental_solution_rho
from .params import KernelParams
from .special_functions import sphere_area

logger = logging.getLogger(__name__)

DEFAULT_FD_STEP = 1e-4
DEFAULT_CHECK_TOL = 1e-6
FLUX_STEP = 1e-4
SINGULARITY_GRID = (1e-2, 1e-3, 1e-4)
SINGULARITY_CUTOFF = 1e-3
DECAY_GRID = (1.0, 10.0, 20.0, 30.0)
DECAY_TOL = 1e-12


def _profile(params: KernelParams, route: EvalRoute) -> Callable[[float], float]:
    def value(rho: float) -> float:
        return fundamental_solution_rho(params, rho, route).value

    return value


def radial_residuals(
    f: Callable[[float], float],
    d: int,
    rho_grid: Iterable[float],
    h: float = DEFAULT_FD_STEP,
) -> List[float]:
    """
    |f'' + (d-1) coth(rho) f'| / |f''| by central differences at each rho.
    """
    residuals: List[float] = []
    for rho in rho_grid:
        centre = f(rho)
        plus = f(rho + h)
        minus = f(rho - h)
        first = (plus - minus) / (2.0 * h)
        second = (plus - 2.0 * centre + minus) / (h * h)
        numerator = abs(second + (d - 1) * first / math.tanh(rho))
        if second == 0.0:
            residuals.append(0.0 if numerator == 0.0 else math.inf)
        else:
            residuals.append(numerator / abs(second))
    return residuals


def radial_harmonicity(
    d: int,
    R: float,
    rho_grid: Sequence[float],
    h: float = DEFAULT_FD_STEP,
    tol: float = DEFAULT_CHECK_TOL,
) -> VerificationReport:
    if not 1e-5 <= h <= 1e-3:
        raise ValueError(f"Finite-difference step must lie in [1e-5, 1e-3], got {h!r}.")
    if any(rho < 10.0 * h for rho in rho_grid):
        raise ValueError(f"Every grid point must be at least 10*h = {10.0 * h!r} from the pole.")
    params = KernelParams(d=d, R=R)
    worst = 0.0
    for rho in rho_grid:
        (residual,) = radial_residuals(_profile(params, auto_route(rho)), params.d, [rho], h)
        worst = max(worst, residual)
    return VerificationReport("harmonicity", params.d, params.R, worst, tol, list(rho_grid))


def flux_unit(d: int, R: float, r: float) -> float:
    """
    Outward flux of the kernel through the geodesic sphere of radius R r.

    The radial derivative comes from a five-point central difference with step
    1e-4 * max(1, r); the analytic value is 1 for every d, R and r.
    """
    params = KernelParams(d=d, R=R)
    if not r > params.rho_min:
        raise ValueError(f"r must exceed rho_min={params.rho_min!r}, got {r!r}.")
    f = _profile(params, auto_route(r))
    step = FLUX_STEP * max(1.0, r)
    derivative = (-f(r + 2.0 * step) + 8.0 * f(r + step) - 8.0 * f(r - step) + f(r - 2.0 * step)) / (12.0 * step)
    area = params.R ** (params.d - 1) * math.sinh(r) ** (params.d - 1) * sphere_area(params.d)
    return -(derivative / params.R) * area


def flux_report(
    d: int,
    R: float,
    r_grid: Sequence[float] = (0.1, 1.0, 5.0),
    tol: float = DEFAULT_CHECK_TOL,
) -> VerificationReport:
    worst = max(abs(flux_unit(d, R, r) - 1.0) for r in r_grid)
    return VerificationReport("flux", int(d), float(R), worst, tol, list(r_grid))


def _singularity_residual(params: KernelParams, rho: float) -> float:
    value = fundamental_solution_rho(params, rho).value
    if params.d == 2:
        return abs(2.0 * math.pi * value + math.log(rho) - math.log(2.0))
    return abs(value / euclidean_green(params.d, params.R * rho) - 1.0)


def singularity_match(d: int, R: float, tol: Optional[float] = None) -> VerificationReport:
    """
    Compare the kernel with the Euclidean Green's function near the pole.

    For d >= 3 the residual is |H / G - 1|; for d = 2 it is
    |2 pi H + log rho - log 2|. The reported residual is the largest one at
    rho <= 1e-3, or infinity when residuals do not shrink toward the pole.
    """
    params = KernelParams(d=d, R=R)
    if tol is None:
        tol = 1e-3 if params.d == 2 else 1e-2
    residuals = [_singularity_residual(params, rho) for rho in SINGULARITY_GRID]
    shrinking = all(later < earlier for earlier, later in zip(residuals, residuals[1:]))
    if shrinking:
        worst = max(res for rho, res in zip(SINGULARITY_GRID, residuals) if rho <= SINGULARITY_CUTOFF)
    else:
        logger.warning("Singularity residuals for d=%s R=%s do not shrink: %s", params.d, params.R, residuals)
        worst = math.inf
    return VerificationReport("singularity", params.d, params.R, worst, tol, list(SINGULARITY_GRID))


def decay_check(d: int, R: float) -> VerificationReport:
    """
    The kernel at rho = 10, 20, 30 is positive, strictly decreasing and below 1e-12 of its value at rho = 1.
    """
    params = KernelParams(d=d, R=R)
    values = [fundamental_solution_rho(params, rho).value for rho in DECAY_GRID]
    positive = all(v > 0.0 for v in values)
    decreasing = all(later < earlier for earlier, later in zip(values, values[1:]))
    if positive and decreasing:
        worst = values[-1] / values[0]
    else:
        logger.warning("Kernel values for d=%s R=%s are not positive and decreasing: %s", params.d, params.R, values)
        worst = math.inf
    return VerificationReport("decay", params.d, params.R, worst, DECAY_TOL, list(DECAY_GRID))


def run_suite(
    d_values: Iterable[int],
    radii: Sequence[float] = (0.5, 1.0, 2.0),
    tol: float = DEFAULT_CHECK_TOL,
    grid: Optional[Sequence[float]] = None,
    h: float = DEFAULT_FD_STEP,
    flux_radii: Sequence[float] = (0.1, 1.0, 5.0),
) -> List[VerificationReport]:
    """
    Run every check for each (d, R); harmonicity and flux use ``tol``.
    """
    if grid is None:
        grid = [0.5 + 0.5 * i for i in range(10)]
    reports: List[VerificationReport] = []
    for d in d_values:
        for R in radii:
            logger.info("Verifying d=%s R=%s", d, R)
            reports.append(radial_harmonicity(d, R, grid, h, tol))
            reports.append(flux_report(d, R, flux_radii, tol))
            reports.append(singularity_match(d, R))
            reports.append(decay_check(d, R))
    failed = [report for report in reports if not report.passed]
    if failed:
        logger.warning("%d of %d checks failed.", len(failed), len(reports))
    else:
        logger.info("All %d checks passed.", len(reports))
    return reports
