"""
Real-argument special functions used by the hyperbolic Green's kernel.

Gamma, double factorial and Pochhammer symbols, the Gauss hypergeometric
series 2F1 inside the unit disk, and the associated Legendre function of the
second kind Q_nu^mu(z) with nu = mu = d/2 - 1, following

    Q_nu^mu(z) = sqrt(pi) e^{i pi mu} Gamma(nu + mu + 1) (z^2 - 1)^{mu/2}
                 / (2^{nu+1} Gamma(nu + 3/2) z^{nu + mu + 1})
                 * 2F1((nu + mu + 2)/2, (nu + mu + 1)/2; nu + 3/2; 1/z^2)

for z > 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

EPS = float(np.finfo(float).eps)
MAX_SERIES_TERMS = 100_000
CONSECUTIVE_SMALL_TERMS = 3


class SpecialFunctionError(ValueError):
    """Raised when a special function is called outside its domain."""


class HypergeometricConvergenceError(RuntimeError):
    """Raised when the 2F1 series does not settle within the term cap."""

    def __init__(self, message: str, *, partial_sum: float, terms: int) -> None:
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


def gamma_fn(x: float) -> float:
    """
    Gamma(x) for real x > 0.
    """
    if not x > 0.0:
        raise SpecialFunctionError(f"gamma_fn is only defined here for x > 0, got {x!r}.")
    return float(special.gamma(x))


def double_factorial(n: int) -> float:
    """
    n!! = n (n-2) ... 2 for even n >= 2, n (n-2) ... 1 for odd n >= 1, 1 for n in {-1, 0}.
    """
    if int(n) != n:
        raise SpecialFunctionError(f"double_factorial needs an integer, got {n!r}.")
    n = int(n)
    if n < -1:
        raise SpecialFunctionError(f"double_factorial is undefined for n < -1, got {n}.")
    if n <= 0:
        return 1.0
    return float(special.factorial2(n, exact=True))


def pochhammer(z: float, n: int) -> float:
    """
    Rising factorial (z)_n = z (z + 1) ... (z + n - 1); (z)_0 = 1.
    """
    if int(n) != n or n < 0:
        raise SpecialFunctionError(f"pochhammer needs an integer n >= 0, got {n!r}.")
    if n == 0:
        return 1.0
    return float(np.prod(z + np.arange(int(n), dtype=float)))


def sphere_area(d: int) -> float:
    """
    Area 2 pi^{d/2} / Gamma(d/2) of the unit sphere S^{d-1} in R^d.
    """
    return 2.0 * math.pi ** (0.5 * d) / gamma_fn(0.5 * d)


def log_coth_half(rho: float) -> float:
    """
    log coth(rho/2), evaluated as log1p(2 / expm1(rho)).
    """
    return math.log1p(2.0 / math.expm1(rho))


def coth_power_excess(m: int, rho: float) -> float:
    """
    coth^m(rho) - 1 without cancellation, via coth(rho) = 1 + 2/expm1(2 rho).
    """
    return math.expm1(m * math.log1p(2.0 / math.expm1(2.0 * rho)))


@dataclass(frozen=True)
class Hyp2F1Params:
    """
    Arguments of 2F1(a, b; c; z) restricted to the disk of convergence.
    """

    a: float
    b: float
    c: float
    z: float

    def __post_init__(self) -> None:
        if not abs(self.z) < 1.0:
            raise SpecialFunctionError(f"2F1 series needs |z| < 1, got z={self.z!r}.")
        if self.c <= 0.0 and float(self.c).is_integer():
            raise SpecialFunctionError(f"2F1 is undefined for c a non-positive integer, got c={self.c!r}.")


@dataclass(frozen=True)
class Hyp2F1Result:
    value: float
    est_error: float
    terms: int


def gauss_2f1(p: Hyp2F1Params, tol: float = 1e-16, *, max_terms: int = MAX_SERIES_TERMS) -> Hyp2F1Result:
    """
    Sum the hypergeometric series

        2F1(a, b; c; z) = sum_n (a)_n (b)_n / ((c)_n n!) z^n

    until three consecutive terms fall below tol * |partial sum|.

    The returned est_error is the geometric tail bound |t| r / (1 - r), with
    r the larger of |z| and the last term ratio, plus the rounding of the sum.
    """
    a, b, c, z = p.a, p.b, p.c, p.z
    term = 1.0
    total = 1.0
    magnitude = 1.0
    ratio = 0.0
    small_run = 0
    n = 0
    while small_run < CONSECUTIVE_SMALL_TERMS:
        if n >= max_terms:
            raise HypergeometricConvergenceError(
                f"2F1({a}, {b}; {c}; {z}) did not converge within {max_terms} terms.",
                partial_sum=total,
                terms=n,
            )
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term *= ratio
        n += 1
        total += term
        magnitude += abs(term)
        if abs(term) <= tol * abs(total):
            small_run += 1
        else:
            small_run = 0

    bound = max(abs(ratio), abs(z))
    tail = abs(term) * bound / (1.0 - bound) if bound < 1.0 else abs(term) * max_terms
    est_error = tail + 2.0 * EPS * magnitude
    return Hyp2F1Result(value=total, est_error=est_error, terms=n)


@dataclass(frozen=True)
class LegendreQArg:
    """
    Equal degree and order nu = mu, argument z > 1.
    """

    degree_order: float
    z: float

    def __post_init__(self) -> None:
        if not self.z > 1.0:
            raise SpecialFunctionError(f"Q_nu^mu(z) is evaluated for z > 1 only, got z={self.z!r}.")
        index = 2.0 * self.degree_order + 1.0
        if index <= 0.0 and index.is_integer():
            raise SpecialFunctionError(
                f"nu + mu + 1 = {index} is a non-positive integer; Q_nu^mu is undefined."
            )


@dataclass(frozen=True)
class LegendreQValue:
    value: complex
    est_error: float


def legendre_q_with_error(arg: LegendreQArg, tol: float = 1e-16) -> LegendreQValue:
    nu = mu = arg.degree_order
    z = arg.z
    series = gauss_2f1(
        Hyp2F1Params(a=0.5 * (nu + mu + 2.0), b=0.5 * (nu + mu + 1.0), c=nu + 1.5, z=1.0 / (z * z)),
        tol,
    )
    magnitude = (
        math.sqrt(math.pi)
        * gamma_fn(nu + mu + 1.0)
        * ((z - 1.0) * (z + 1.0)) ** (0.5 * mu)
        / (2.0 ** (nu + 1.0) * gamma_fn(nu + 1.5) * z ** (nu + mu + 1.0))
    )
    phase = cmath.exp(1j * math.pi * mu)
    return LegendreQValue(
        value=phase * magnitude * series.value,
        est_error=abs(magnitude) * series.est_error,
    )


def legendre_q_equal(arg: LegendreQArg, tol: float = 1e-16) -> complex:
    """
    Q_nu^nu(z) in complex arithmetic; real for integer nu, imaginary for half-integer nu.
    """
    return legendre_q_with_error(arg, tol).value


def legendre_q_closed_form(nu: float, rho: float) -> complex:
    """
    Elementary closed forms of Q_nu^nu(cosh rho) for nu in {0, 1/2, 1, 3/2, 2, 5/2}.
    """
    if not rho > 0.0:
        raise SpecialFunctionError(f"rho must be positive, got {rho!r}.")
    twice = 2.0 * nu
    if not twice.is_integer() or not 0 <= twice <= 5:
        raise SpecialFunctionError(f"No closed form tabulated for nu={nu!r}.")
    sinh = math.sinh(rho)
    cosh = math.cosh(rho)
    log_coth = log_coth_half(rho)
    half_pi_root = math.sqrt(0.5 * math.pi)
    excess = [coth_power_excess(m, rho) for m in (1, 3, 5)]
    table = {
        0: log_coth,
        1: 1j * half_pi_root * excess[0],
        2: log_coth - cosh / sinh**2,
        3: 3j * half_pi_root * (-excess[1] / 3.0 + excess[0]),
        4: 3.0 * log_coth + 2.0 * cosh / sinh**4 - 3.0 * cosh / sinh**2,
        5: 15j * half_pi_root * (excess[2] / 5.0 - 2.0 * excess[1] / 3.0 + excess[0]),
    }
    return complex(table[int(twice)]) * sinh**nu
