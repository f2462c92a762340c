"""
Fundamental solution of the Laplace-Beltrami operator on H_R^d.

    H_R^d(x, x') = c0 / R^{d-2} * I_d(rho),   c0 = Gamma(d/2) / (2 pi^{d/2}),
    I_d(rho)     = integral from rho to infinity of dx / sinh^{d-1}(x),

with rho = d(x, x') / R. I_d is evaluated by four independent routes:
adaptive quadrature, the finite sums in log coth / coth / sinh powers, the
Gauss hypergeometric representation (plain and Euler-transformed) and the
associated Legendre function Q_{d/2-1}^{d/2-1}(cosh rho).
"""

from __future__ import annotations

import cmath
import logging
import math
import sys
import warnings
from typing import Optional

from scipy import integrate

from .data_structures import EvalResult, EvalRoute
from .minkowski_geometry import AmbientPoint, rho_between
from .params import DEFAULT_RHO_MIN, DEFAULT_TOL_REL, KernelParams, normalize_dimension
from .special_functions import (
    EPS,
    Hyp2F1Params,
    HypergeometricConvergenceError,
    LegendreQArg,
    coth_power_excess,
    double_factorial,
    gamma_fn,
    gauss_2f1,
    legendre_q_with_error,
    log_coth_half,
)

logger = logging.getLogger(__name__)

AUTO_SUM_THRESHOLD = 0.5
HYP2F1_MAX_ARGUMENT = 0.995
LEGENDRE_MIN_RHO = 0.1
SERIES_TOL = 1e-16
QUAD_LIMIT = 500
SMALL_RHO_LIMIT = 0.01
LOG2 = math.log(2.0)


class RouteError(RuntimeError):
    """Raised when an evaluation route cannot deliver the requested accuracy."""

    def __init__(self, message: str, *, route: EvalRoute, best_estimate: Optional[float] = None) -> None:
        super().__init__(message)
        self.route = route
        self.best_estimate = best_estimate


class SingularityError(ValueError):
    """Raised when an evaluation is requested at or too close to the pole."""


def c0(d: int) -> float:
    """
    Normalization Gamma(d/2) / (2 pi^{d/2}) fixed by matching the Euclidean singularity.
    """
    return gamma_fn(0.5 * d) / (2.0 * math.pi ** (0.5 * d))


def _check_rho(d: int, rho: float, rho_min: float) -> int:
    dim = normalize_dimension(d)
    if math.isnan(rho) or rho < rho_min:
        raise SingularityError(
            f"rho={rho!r} is below rho_min={rho_min!r}; use small_rho_asymptotic near the pole."
        )
    return dim


def _log_cosh(rho: float) -> float:
    return rho - LOG2 + math.log1p(math.exp(-2.0 * rho))


def _log_sinh(rho: float) -> float:
    return rho - LOG2 + math.log(-math.expm1(-2.0 * rho))


def _require_normal(result: EvalResult, d: int, rho: float) -> EvalResult:
    # subnormal or zero means the prefactor underflowed; quadrature still resolves it
    if not result.value >= sys.float_info.min:
        raise RouteError(
            f"I_{d}({rho}) underflows on the {result.route.value} route; use the quadrature route.",
            route=result.route,
            best_estimate=result.value,
        )
    return result


def _overflow_failure(route: EvalRoute, d: int, rho: float, exc: OverflowError) -> RouteError:
    return RouteError(
        f"{route.value} route overflows for I_{d}({rho}) ({exc}); use the quadrature route.",
        route=route,
    )


def i_quadrature(
    d: int,
    rho: float,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> EvalResult:
    """
    Adaptive quadrature of I_d after u = exp(-x) = t exp(-rho):

        I_d(rho) = 2^{d-1} e^{-(d-1) rho} * integral over (0, 1) of t^{d-2} / (1 - u^2)^{d-1} dt.

    The tolerance applies to the integral over (0, 1); the exponential factor is
    applied in log space, so very large rho gives the rounded (possibly zero) value.
    """
    d = _check_rho(d, rho, rho_min)
    upper = math.exp(-rho)

    def integrand(t: float) -> float:
        u = upper * t
        return t ** (d - 2) / ((1.0 - u) * (1.0 + u)) ** (d - 1)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        output = integrate.quad(
            integrand,
            0.0,
            1.0,
            epsabs=0.0,
            epsrel=max(1e-3 * tol, 1e-13),
            limit=QUAD_LIMIT,
            full_output=1,
        )
    scaled, scaled_err = float(output[0]), float(output[1])
    if len(output) > 3:
        logger.debug("quad reported for d=%s rho=%s: %s", d, rho, output[3])
    value = math.exp((d - 1) * (LOG2 - rho) + math.log(scaled)) if scaled > 0.0 else scaled
    if not math.isfinite(scaled) or scaled_err > tol * abs(scaled):
        raise RouteError(
            f"Quadrature for I_{d}({rho}) reached error {scaled_err:.3g} on an integral of {scaled:.3g}, "
            f"above tolerance {tol:.3g}.",
            route=EvalRoute.QUADRATURE,
            best_estimate=value,
        )
    est_error = value * (scaled_err / scaled) if scaled > 0.0 else 0.0
    return EvalResult(value=value, route=EvalRoute.QUADRATURE, est_error=est_error)


def _even_sum(d: int, rho: float) -> tuple[float, float]:
    prefactor = (-1) ** (d // 2 - 1) * double_factorial(d - 3) / double_factorial(d - 2)
    cosh = math.cosh(rho)
    sinh = math.sinh(rho)
    terms = [log_coth_half(rho)]
    for k in range(1, d // 2):
        terms.append(
            cosh * double_factorial(2 * k - 2) * (-1) ** k / (double_factorial(2 * k - 1) * sinh ** (2 * k))
        )
    value = prefactor * math.fsum(terms)
    return value, 4.0 * EPS * abs(prefactor) * sum(abs(t) for t in terms)


def _odd_coth_sum(d: int, rho: float) -> tuple[float, float]:
    # constant terms cancel identically; only coth^m - 1 survives
    n = (d - 1) // 2
    prefactor = (-1) ** n * math.factorial(n - 1)
    terms = [
        (-1) ** k
        * coth_power_excess(2 * k - 1, rho)
        / ((2 * k - 1) * math.factorial(k - 1) * math.factorial(n - k))
        for k in range(1, n + 1)
    ]
    value = prefactor * math.fsum(terms)
    return value, 4.0 * EPS * abs(prefactor) * sum(abs(t) for t in terms)


def _odd_sinh_sum(d: int, rho: float) -> tuple[float, float]:
    n = (d - 1) // 2
    prefactor = (-1) ** n * double_factorial(d - 3) / double_factorial(d - 2)
    cosh = math.cosh(rho)
    sinh = math.sinh(rho)
    terms = [1.0]
    for k in range(1, n + 1):
        terms.append(
            cosh
            * double_factorial(2 * k - 3)
            * (-1) ** k
            / (double_factorial(2 * k - 2) * sinh ** (2 * k - 1))
        )
    value = prefactor * math.fsum(terms)
    return value, 4.0 * EPS * abs(prefactor) * sum(abs(t) for t in terms)


def i_finite_sum(d: int, rho: float, *, rho_min: float = DEFAULT_RHO_MIN) -> EvalResult:
    """
    Finite sums for I_d. Odd d evaluates both the coth-power and the sinh-power
    form; the first is returned and any disagreement the second form's rounding
    does not explain is added to est_error.

    There is no tolerance argument: the sums are exact up to rounding, and the
    caller (try_route, the AUTO policy) decides acceptance from est_error.
    """
    d = _check_rho(d, rho, rho_min)
    try:
        if d % 2 == 0:
            value, est_error = _even_sum(d, rho)
        else:
            value, est_error = _odd_coth_sum(d, rho)
            other, other_error = _odd_sinh_sum(d, rho)
            est_error += max(0.0, abs(value - other) - other_error)
    except OverflowError as exc:
        raise _overflow_failure(EvalRoute.FINITE_SUM, d, rho, exc) from exc
    return EvalResult(value=value, route=EvalRoute.FINITE_SUM, est_error=est_error)


def _series_failure(route: EvalRoute, d: int, rho: float, exc: HypergeometricConvergenceError) -> RouteError:
    return RouteError(
        f"2F1 series for I_{d}({rho}) did not converge after {exc.terms} terms; use the sum or quadrature route.",
        route=route,
        best_estimate=exc.partial_sum,
    )


def i_hyp2f1(
    d: int,
    rho: float,
    euler_variant: bool = False,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> EvalResult:
    """
    Hypergeometric representation with z = 1/cosh^2(rho):

        plain: 1 / ((d-1) cosh^{d-1} rho)             2F1((d-1)/2, d/2; (d+1)/2; z)
        euler: 1 / ((d-1) cosh rho sinh^{d-2} rho)    2F1(1/2, 1; (d+1)/2; z)
    """
    d = _check_rho(d, rho, rho_min)
    route = EvalRoute.HYP2F1_EULER if euler_variant else EvalRoute.HYP2F1
    log_cosh = _log_cosh(rho)
    z = math.exp(-2.0 * log_cosh)
    if z > HYP2F1_MAX_ARGUMENT:
        raise RouteError(
            f"rho={rho!r} gives 1/cosh^2(rho)={z:.6f} > {HYP2F1_MAX_ARGUMENT}; use the sum or quadrature route.",
            route=route,
        )
    # prefactors in log space so large rho underflows instead of overflowing
    if euler_variant:
        params = Hyp2F1Params(a=0.5, b=1.0, c=0.5 * (d + 1), z=z)
        prefactor = math.exp(-math.log(d - 1) - log_cosh - (d - 2) * _log_sinh(rho))
    else:
        params = Hyp2F1Params(a=0.5 * (d - 1), b=0.5 * d, c=0.5 * (d + 1), z=z)
        prefactor = math.exp(-math.log(d - 1) - (d - 1) * log_cosh)
    try:
        series = gauss_2f1(params, min(tol, SERIES_TOL))
    except HypergeometricConvergenceError as exc:
        raise _series_failure(route, d, rho, exc) from exc
    value = prefactor * series.value
    result = EvalResult(
        value=value,
        route=route,
        est_error=prefactor * series.est_error + 2.0 * EPS * abs(value),
    )
    return _require_normal(result, d, rho)


def i_legendre(
    d: int,
    rho: float,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> EvalResult:
    """
    I_d(rho) = e^{-i pi (d/2 - 1)} / (2^{d/2-1} Gamma(d/2) sinh^{d/2-1} rho) * Q_{d/2-1}^{d/2-1}(cosh rho),
    evaluated in complex arithmetic; the imaginary part left over is reported as imag_residue.
    """
    d = _check_rho(d, rho, rho_min)
    route = EvalRoute.LEGENDRE_Q
    if rho < LEGENDRE_MIN_RHO:
        raise RouteError(
            f"The Legendre route needs rho >= {LEGENDRE_MIN_RHO}, got {rho!r}.",
            route=route,
        )
    nu = 0.5 * d - 1.0
    try:
        q = legendre_q_with_error(LegendreQArg(degree_order=nu, z=math.cosh(rho)), min(tol, SERIES_TOL))
        scale = 1.0 / (2.0**nu * gamma_fn(0.5 * d) * math.sinh(rho) ** nu)
    except HypergeometricConvergenceError as exc:
        raise _series_failure(route, d, rho, exc) from exc
    except OverflowError as exc:
        raise _overflow_failure(route, d, rho, exc) from exc
    full = cmath.exp(-1j * math.pi * nu) * scale * q.value
    value = full.real
    imag_residue = abs(full.imag)
    result = _require_normal(
        EvalResult(
            value=value,
            route=route,
            est_error=scale * q.est_error + 2.0 * EPS * abs(value),
            imag_residue=imag_residue,
        ),
        d,
        rho,
    )
    if imag_residue > 1e-10 * max(1.0, abs(value)):
        raise RouteError(
            f"Legendre route for I_{d}({rho}) left an imaginary part {imag_residue:.3g}.",
            route=route,
            best_estimate=value,
        )
    return result


def _auto(d: int, rho: float, tol: float, rho_min: float) -> EvalResult:
    if rho < AUTO_SUM_THRESHOLD:
        return i_finite_sum(d, rho, rho_min=rho_min)
    try:
        plain = i_hyp2f1(d, rho, False, tol, rho_min=rho_min)
        euler = i_hyp2f1(d, rho, True, tol, rho_min=rho_min)
    except RouteError as exc:
        logger.info("Hypergeometric route failed for d=%s rho=%s (%s); using quadrature.", d, rho, exc)
        return i_quadrature(d, rho, tol, rho_min=rho_min)
    chosen = EvalResult(
        value=plain.value,
        route=EvalRoute.HYP2F1,
        est_error=plain.est_error + abs(plain.value - euler.value),
    )
    if chosen.est_error <= tol * abs(chosen.value):
        return chosen
    logger.info(
        "Hypergeometric variants disagree for d=%s rho=%s (est_error=%.3g); falling back to quadrature.",
        d,
        rho,
        chosen.est_error,
    )
    return i_quadrature(d, rho, tol, rho_min=rho_min)


def evaluate_i(
    d: int,
    rho: float,
    route: EvalRoute = EvalRoute.AUTO,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> EvalResult:
    """
    Evaluate I_d(rho) by the requested route. AUTO uses the finite sums below
    rho = 0.5 and the hypergeometric series above, with quadrature arbitrating
    when the two hypergeometric variants disagree beyond tol.
    """
    _check_rho(d, rho, rho_min)
    if route is EvalRoute.QUADRATURE:
        return i_quadrature(d, rho, tol, rho_min=rho_min)
    if route is EvalRoute.FINITE_SUM:
        return i_finite_sum(d, rho, rho_min=rho_min)
    if route is EvalRoute.HYP2F1:
        return i_hyp2f1(d, rho, False, tol, rho_min=rho_min)
    if route is EvalRoute.HYP2F1_EULER:
        return i_hyp2f1(d, rho, True, tol, rho_min=rho_min)
    if route is EvalRoute.LEGENDRE_Q:
        return i_legendre(d, rho, tol, rho_min=rho_min)
    return _auto(d, rho, tol, rho_min)


def auto_route(rho: float) -> EvalRoute:
    """
    Route the AUTO policy tries first at rho.
    """
    return EvalRoute.FINITE_SUM if rho < AUTO_SUM_THRESHOLD else EvalRoute.HYP2F1


def try_route(
    route: EvalRoute,
    d: int,
    rho: float,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> Optional[EvalResult]:
    """
    Evaluate by one route, or return None when the route's preconditions fail
    or its own error estimate exceeds tol * |value|.
    """
    try:
        result = evaluate_i(d, rho, route, tol, rho_min=rho_min)
    except (RouteError, SingularityError) as exc:
        logger.debug("Route %s skipped for d=%s rho=%s: %s", route.value, d, rho, exc)
        return None
    if not math.isfinite(result.value) or result.est_error > tol * abs(result.value):
        logger.debug(
            "Route %s skipped for d=%s rho=%s: est_error %.3g above tolerance.",
            route.value,
            d,
            rho,
            result.est_error,
        )
        return None
    return result


def route_available(
    route: EvalRoute,
    d: int,
    rho: float,
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
) -> bool:
    return try_route(route, d, rho, tol, rho_min=rho_min) is not None


def fundamental_solution_rho(
    params: KernelParams,
    rho: float,
    route: EvalRoute = EvalRoute.AUTO,
) -> EvalResult:
    """
    H_R^d as a function of rho = d(x, x') / R.
    """
    result = evaluate_i(params.d, rho, route, params.tol_rel, rho_min=params.rho_min)
    return result.scaled(c0(params.d) / params.R ** (params.d - 2))


def fundamental_solution(
    params: KernelParams,
    x: AmbientPoint,
    x2: AmbientPoint,
    route: EvalRoute = EvalRoute.AUTO,
) -> EvalResult:
    rho = rho_between(x, x2, params)
    if rho < params.rho_min:
        raise SingularityError(
            f"Points are {rho * params.R:.3g} apart, closer than rho_min * R; the kernel is singular there."
        )
    return fundamental_solution_rho(params, rho, route)


def euclidean_green(d: int, distance: float) -> float:
    """
    Euclidean fundamental solution of -Laplace in R^d:
    (1/2 pi) log(1/distance) for d = 2, Gamma(d/2) / (2 pi^{d/2} (d-2)) distance^{2-d} otherwise.
    """
    if int(d) != d or d < 1:
        raise ValueError(f"Euclidean dimension must be a positive integer, got {d!r}.")
    d = int(d)
    if not distance > 0.0:
        raise SingularityError(f"Euclidean Green's function is singular at distance {distance!r}.")
    if d == 2:
        return -math.log(distance) / (2.0 * math.pi)
    return c0(d) / (d - 2) * distance ** (2 - d)


def i_recurrence_check(d: int, rho: float, tol: float = DEFAULT_TOL_REL) -> float:
    """Absolute residual of I_d = cosh rho / ((d-2) sinh^{d-2} rho) - (d-3)/(d-2) I_{d-2}."""
    d = normalize_dimension(d)
    if d < 4:
        raise ValueError(f"The recurrence needs d >= 4, got {d}.")
    lhs = evaluate_i(d, rho, EvalRoute.AUTO, tol).value
    lower = evaluate_i(d - 2, rho, EvalRoute.AUTO, tol).value
    rhs = math.cosh(rho) / ((d - 2) * math.sinh(rho) ** (d - 2)) - (d - 3) / (d - 2) * lower
    return abs(lhs - rhs)


def small_rho_asymptotic(d: int, rho: float) -> float:
    """
    Leading behavior of I_d near the pole: -log rho for d = 2, rho^{2-d} / (d-2) for d >= 3.
    """
    d = normalize_dimension(d)
    if not 0.0 < rho <= SMALL_RHO_LIMIT:
        raise ValueError(f"small_rho_asymptotic needs 0 < rho <= {SMALL_RHO_LIMIT}, got {rho!r}.")
    if d == 2:
        return -math.log(rho)
    return rho ** (2 - d) / (d - 2)


def antiderivative_sinh_power(m: int, x: float, *, coth_powers: bool = False) -> float:
    """
    Antiderivative of 1 / sinh^m(x) with zero integration constant.

    Odd m = 2n+1:
        (-1)^{n+1} (2n-1)!!/(2n)!! [log coth(x/2) + cosh x sum_k (2k-2)!! (-1)^k / ((2k-1)!! sinh^{2k} x)]
    Even m = 2n, sinh powers (default) or, with coth_powers, the coth expansion
        (-1)^{n+1} (n-1)! sum_k (-1)^k coth^{2k-1} x / ((2k-1) (k-1)! (n-k)!).
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}.")
    if not x > 0.0:
        raise ValueError(f"x must be positive, got {x!r}.")
    m = int(m)
    cosh = math.cosh(x)
    sinh = math.sinh(x)
    if m % 2 == 1:
        n = (m - 1) // 2
        inner = log_coth_half(x) + cosh * math.fsum(
            double_factorial(2 * k - 2) * (-1) ** k / (double_factorial(2 * k - 1) * sinh ** (2 * k))
            for k in range(1, n + 1)
        )
        return (-1) ** (n + 1) * double_factorial(2 * n - 1) / double_factorial(2 * n) * inner

    n = m // 2
    if coth_powers:
        coth = cosh / sinh
        return (-1) ** (n + 1) * math.factorial(n - 1) * math.fsum(
            (-1) ** k * coth ** (2 * k - 1) / ((2 * k - 1) * math.factorial(k - 1) * math.factorial(n - k))
            for k in range(1, n + 1)
        )
    return (
        (-1) ** (n + 1)
        * double_factorial(2 * n - 2)
        / double_factorial(2 * n - 1)
        * cosh
        * math.fsum(
            double_factorial(2 * k - 3) * (-1) ** k / (double_factorial(2 * k - 2) * sinh ** (2 * k - 1))
            for k in range(1, n + 1)
        )
    )


def antiderivative_limit(m: int) -> float:
    """
    Limit of antiderivative_sinh_power(m, x) as x -> infinity.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}.")
    m = int(m)
    if m % 2 == 1:
        return 0.0
    n = m // 2
    return (-1) ** n * double_factorial(2 * n - 2) / double_factorial(2 * n - 1)


def antiderivative_hyp2f1(d: int, rho: float) -> float:
    """
    -1 / ((d-1) cosh^{d-1} rho) * 2F1((d-1)/2, d/2; (d+1)/2; 1/cosh^2 rho), an antiderivative of sinh^{1-d}.
    """
    d = normalize_dimension(d)
    cosh = math.cosh(rho)
    series = gauss_2f1(Hyp2F1Params(a=0.5 * (d - 1), b=0.5 * d, c=0.5 * (d + 1), z=1.0 / (cosh * cosh)), SERIES_TOL)
    return -series.value / ((d - 1) * cosh ** (d - 1))


def closed_form_i(d: int, rho: float) -> float:
    """
    Elementary closed forms of I_d for d = 2..7.
    """
    if not rho > 0.0:
        raise ValueError(f"rho must be positive, got {rho!r}.")
    cosh = math.cosh(rho)
    sinh = math.sinh(rho)
    log_coth = log_coth_half(rho)
    forms = {
        2: lambda: log_coth,
        3: lambda: coth_power_excess(1, rho),
        4: lambda: -0.5 * log_coth + cosh / (2.0 * sinh**2),
        5: lambda: coth_power_excess(3, rho) / 3.0 - coth_power_excess(1, rho),
        6: lambda: 0.375 * log_coth + cosh / (4.0 * sinh**4) - 3.0 * cosh / (8.0 * sinh**2),
        7: lambda: coth_power_excess(5, rho) / 5.0
        - 2.0 * coth_power_excess(3, rho) / 3.0
        + coth_power_excess(1, rho),
    }
    if d not in forms:
        raise ValueError(f"No closed form listed for d={d!r}; expected 2 <= d <= 7.")
    return forms[d]()
