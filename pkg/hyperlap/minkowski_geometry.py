"""
Points on the R-radius hyperboloid H_R^d embedded in Minkowski space R^{d,1}.

Points live on the upper sheet [x, x] = R^2, x_0 > 0, where
[x, y] = x_0 y_0 - x_1 y_1 - ... - x_d y_d. Standard geodesic polar
coordinates are

    x_0     = R cosh r
    x_1     = R sinh r cos(theta_1)
    x_2     = R sinh r sin(theta_1) cos(theta_2)
    ...
    x_{d-1} = R sinh r sin(theta_1) ... sin(theta_{d-2}) cos(phi)
    x_d     = R sinh r sin(theta_1) ... sin(theta_{d-2}) sin(phi)

with r >= 0, theta_i in [0, pi] and phi in [0, 2 pi). For d = 2 there are no
theta angles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from .params import KernelParams, MIN_DIMENSION

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Raised for dimension mismatches and points that are not on the hyperboloid."""


@dataclass(frozen=True, eq=False)
class AmbientPoint:
    """
    A point (x_0, ..., x_d) of Minkowski space.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.coords, dtype=float).reshape(-1)
        if values.size < MIN_DIMENSION + 1:
            raise GeometryError(
                f"An ambient point needs at least {MIN_DIMENSION + 1} coordinates, got {values.size}."
            )
        if not np.all(np.isfinite(values)):
            raise GeometryError("Ambient coordinates must be finite.")
        values.setflags(write=False)
        object.__setattr__(self, "coords", values)

    @classmethod
    def origin(cls, params: KernelParams) -> "AmbientPoint":
        coords = np.zeros(params.ambient_dimension)
        coords[0] = params.R
        return cls(coords)

    @property
    def d(self) -> int:
        return self.coords.size - 1

    @property
    def spatial(self) -> np.ndarray:
        return self.coords[1:]

    def scaled(self, factor: float) -> "AmbientPoint":
        return AmbientPoint(self.coords * factor)

    def to_list(self) -> list:
        return [float(value) for value in self.coords]


@dataclass(frozen=True)
class GeodesicPolar:
    """
    Standard geodesic polar coordinates (r, theta_1, ..., theta_{d-2}, phi).
    """

    r: float
    theta: Tuple[float, ...] = field(default_factory=tuple)
    phi: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", tuple(float(value) for value in self.theta))
        object.__setattr__(self, "phi", float(self.phi))
        if not self.r >= 0.0:
            raise GeometryError(f"Radial parameter must be non-negative, got {self.r!r}.")
        for index, value in enumerate(self.theta, start=1):
            if not 0.0 <= value <= math.pi:
                raise GeometryError(f"theta_{index} must lie in [0, pi], got {value!r}.")
        if not 0.0 <= self.phi < TWO_PI:
            raise GeometryError(f"phi must lie in [0, 2 pi), got {self.phi!r}.")

    @property
    def d(self) -> int:
        return len(self.theta) + 2

    def direction(self) -> np.ndarray:
        """
        Unit vector of the angular part (a point of S^{d-1}).
        """
        unit = np.empty(self.d)
        sin_product = 1.0
        for index, angle in enumerate(self.theta):
            unit[index] = sin_product * math.cos(angle)
            sin_product *= math.sin(angle)
        unit[-2] = sin_product * math.cos(self.phi)
        unit[-1] = sin_product * math.sin(self.phi)
        return unit


@dataclass(frozen=True, eq=False)
class LorentzTransform:
    """
    A linear map of R^{d,1} that preserves the Minkowski bilinear form.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.matrix, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise GeometryError("A Lorentz transform needs a square matrix.")
        values.setflags(write=False)
        object.__setattr__(self, "matrix", values)

    @classmethod
    def identity(cls, ambient_dimension: int) -> "LorentzTransform":
        return cls(np.eye(ambient_dimension))

    def apply(self, point: AmbientPoint) -> AmbientPoint:
        if point.coords.size != self.matrix.shape[0]:
            raise GeometryError(
                f"Transform acts on dimension {self.matrix.shape[0] - 1}, point has dimension {point.d}."
            )
        return AmbientPoint(self.matrix @ point.coords)

    __call__ = apply

    def compose(self, other: "LorentzTransform") -> "LorentzTransform":
        """
        Return self after other.
        """
        return LorentzTransform(self.matrix @ other.matrix)

    def preserves_form(self, tol: float = 1e-10) -> bool:
        metric = minkowski_metric(self.matrix.shape[0] - 1)
        drift = self.matrix.T @ metric @ self.matrix - metric
        scale = max(1.0, float(np.max(np.abs(self.matrix))) ** 2)
        return bool(np.max(np.abs(drift)) <= tol * scale)


def minkowski_metric(d: int) -> np.ndarray:
    metric = -np.eye(d + 1)
    metric[0, 0] = 1.0
    return metric


def _check_same_dimension(x: AmbientPoint, y: AmbientPoint) -> None:
    if x.coords.size != y.coords.size:
        raise GeometryError(f"Dimension mismatch: {x.d} vs {y.d}.")


def bilinear_form(x: AmbientPoint, y: AmbientPoint) -> float:
    """
    Minkowski bilinear form [x, y] = x_0 y_0 - x_1 y_1 - ... - x_d y_d.
    """
    _check_same_dimension(x, y)
    return float(x.coords[0] * y.coords[0] - np.dot(x.spatial, y.spatial))


def euclidean_inner(x: AmbientPoint, y: AmbientPoint) -> float:
    _check_same_dimension(x, y)
    return float(np.dot(x.coords, y.coords))


def on_hyperboloid(x: AmbientPoint, params: KernelParams, tol: float | None = None) -> bool:
    """
    True when x is on the upper sheet of [x, x] = R^2.

    The residual of [x, x] is measured against max(R^2, (x, x)) because the
    rounding error of the form grows with the Euclidean size of x.
    """
    if x.d != params.d:
        return False
    tolerance = params.tol_rel if tol is None else tol
    radius_sq = params.R * params.R
    scale = max(radius_sq, euclidean_inner(x, x))
    return x.coords[0] > 0.0 and abs(bilinear_form(x, x) - radius_sq) <= tolerance * scale


def _require_on_hyperboloid(x: AmbientPoint, params: KernelParams, label: str) -> None:
    if x.d != params.d:
        raise GeometryError(f"{label} has dimension {x.d}, expected {params.d}.")
    if not on_hyperboloid(x, params):
        raise GeometryError(f"{label} is not on the upper sheet of H_R^d with R={params.R}.")


def acosh_one_plus(u: float) -> float:
    """
    cosh^{-1}(1 + u) for u >= 0, written as log1p(u + sqrt(u (u + 2))).
    """
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


def geodesic_distance(x: AmbientPoint, x2: AmbientPoint, params: KernelParams) -> float:
    """
    d(x, x') = R cosh^{-1}([x, x'] / R^2).
    """
    _check_same_dimension(x, x2)
    _require_on_hyperboloid(x, params, "x")
    _require_on_hyperboloid(x2, params, "x'")
    ratio = bilinear_form(x, x2) / (params.R * params.R)
    scale = max(1.0, float(np.linalg.norm(x.coords) * np.linalg.norm(x2.coords)) / (params.R * params.R))
    excess = ratio - 1.0
    if excess < 0.0:
        if excess < -params.tol_rel * scale:
            raise GeometryError(
                f"[x, x']/R^2 = {ratio!r} is below 1; the points are not on the same hyperboloid."
            )
        excess = 0.0
    return params.R * acosh_one_plus(excess)


def project_to_unit(x: AmbientPoint, params: KernelParams) -> AmbientPoint:
    """
    x / R, the corresponding point on the unit hyperboloid.
    """
    return x.scaled(1.0 / params.R)


def rho_between(x: AmbientPoint, x2: AmbientPoint, params: KernelParams) -> float:
    """
    rho(x/R, x'/R) = d(x, x') / R.
    """
    return geodesic_distance(x, x2, params) / params.R


def from_geodesic_polar(p: GeodesicPolar, params: KernelParams) -> AmbientPoint:
    if p.d != params.d:
        raise GeometryError(f"Polar point has dimension {p.d}, expected {params.d}.")
    coords = np.empty(params.ambient_dimension)
    coords[0] = params.R * math.cosh(p.r)
    coords[1:] = params.R * math.sinh(p.r) * p.direction()
    return AmbientPoint(coords)


def to_geodesic_polar(x: AmbientPoint, params: KernelParams) -> GeodesicPolar:
    """
    Inverse of from_geodesic_polar. At the pole (r <= rho_min) every angle is 0.
    """
    if x.d != params.d:
        raise GeometryError(f"Point has dimension {x.d}, expected {params.d}.")
    if x.coords[0] / params.R < 1.0 - params.tol_rel:
        raise GeometryError(f"x_0 / R = {x.coords[0] / params.R!r} is below the upper sheet.")
    spatial = x.spatial / params.R
    norm = float(np.linalg.norm(spatial))
    r = math.asinh(norm)
    if r <= params.rho_min:
        return GeodesicPolar(r=r, theta=(0.0,) * (params.d - 2), phi=0.0)

    unit = spatial / norm
    # tail_norms[i] = |(n_i, ..., n_d)|
    tail_norms = np.sqrt(np.cumsum(unit[::-1] ** 2)[::-1])
    theta = tuple(
        math.atan2(float(tail_norms[index + 1]), float(unit[index])) for index in range(params.d - 2)
    )
    phi = math.atan2(float(unit[-1]), float(unit[-2])) % TWO_PI
    if phi >= TWO_PI:
        phi = 0.0
    return GeodesicPolar(r=r, theta=theta, phi=phi)


def separation_angle(p: GeodesicPolar, p2: GeodesicPolar) -> float:
    """
    Separation angle gamma from the product formula

        cos gamma = cos(phi - phi') prod_i sin(theta_i) sin(theta_i')
                    + sum_i cos(theta_i) cos(theta_i') prod_{j<i} sin(theta_j) sin(theta_j').
    """
    if p.d != p2.d:
        raise GeometryError(f"Dimension mismatch: {p.d} vs {p2.d}.")
    cos_gamma = 0.0
    sin_product = 1.0
    for angle, angle2 in zip(p.theta, p2.theta):
        cos_gamma += math.cos(angle) * math.cos(angle2) * sin_product
        sin_product *= math.sin(angle) * math.sin(angle2)
    cos_gamma += math.cos(p.phi - p2.phi) * sin_product
    return math.acos(min(1.0, max(-1.0, cos_gamma)))


def sphere_angle(x: AmbientPoint, x2: AmbientPoint) -> float:
    """
    Angle between the spatial parts of two ambient points, cos^{-1}((u, u') / (|u| |u'|)).
    """
    _check_same_dimension(x, x2)
    norm = float(np.linalg.norm(x.spatial))
    norm2 = float(np.linalg.norm(x2.spatial))
    if norm == 0.0 or norm2 == 0.0:
        raise GeometryError("The separation angle is undefined at the pole.")
    cosine = float(np.dot(x.spatial, x2.spatial)) / (norm * norm2)
    return math.acos(min(1.0, max(-1.0, cosine)))


def geodesic_distance_polar(r: float, r2: float, gamma: float, params: KernelParams) -> float:
    """
    R cosh^{-1}(cosh r cosh r' - sinh r sinh r' cos gamma).

    The argument minus one is evaluated as
    2 sinh^2((r - r')/2) + 2 sinh r sinh r' sin^2(gamma/2).
    """
    if r < 0.0 or r2 < 0.0:
        raise GeometryError("Radial parameters must be non-negative.")
    if not 0.0 <= gamma <= math.pi:
        raise GeometryError(f"gamma must lie in [0, pi], got {gamma!r}.")
    half_gap = math.sinh(0.5 * (r - r2))
    half_gamma = math.sin(0.5 * gamma)
    excess = 2.0 * half_gap * half_gap + 2.0 * math.sinh(r) * math.sinh(r2) * half_gamma * half_gamma
    return params.R * acosh_one_plus(excess)


def _rotation_to_first_axis(direction: np.ndarray) -> np.ndarray:
    """
    Proper rotation Q of R^d with Q direction = e_1 for a unit vector direction.
    """
    size = direction.size
    target = np.zeros(size)
    target[0] = 1.0
    householder = direction - target
    norm = float(np.linalg.norm(householder))
    if norm < 1e-15:
        return np.eye(size)
    householder /= norm
    reflection = np.eye(size) - 2.0 * np.outer(householder, householder)
    # a second reflection along the last axis keeps e_1 fixed and restores det = +1
    reflection[-1, :] *= -1.0
    return reflection


def boost_to_origin(x: AmbientPoint, params: KernelParams | None = None) -> LorentzTransform:
    """
    Lorentz transform taking x to the origin (R, 0, ..., 0) of its hyperboloid.

    A Euclidean rotation first carries x to (R cosh a, R sinh a, 0, ..., 0);
    the hyperbolic rotation

        x_0' = x_0 cosh a - x_1 sinh a
        x_1' = x_1 cosh a - x_0 sinh a

    then maps it to the origin.
    """
    if params is not None:
        _require_on_hyperboloid(x, params, "x")
    elif x.coords[0] <= 0.0:
        raise GeometryError("boost_to_origin needs a point on the upper sheet.")
    radius = math.sqrt(max(bilinear_form(x, x), 0.0)) if params is None else params.R
    size = x.coords.size
    spatial_norm = float(np.linalg.norm(x.spatial))
    if spatial_norm == 0.0:
        return LorentzTransform.identity(size)

    rotation = np.eye(size)
    rotation[1:, 1:] = _rotation_to_first_axis(x.spatial / spatial_norm)

    rapidity = math.asinh(spatial_norm / radius)
    boost = np.eye(size)
    boost[0, 0] = boost[1, 1] = math.cosh(rapidity)
    boost[0, 1] = boost[1, 0] = -math.sinh(rapidity)
    return LorentzTransform(boost @ rotation)


def random_polar(rng: np.random.Generator, d: int, r_max: float = 5.0) -> GeodesicPolar:
    """
    Draw geodesic polar coordinates with r uniform on [0, r_max].
    """
    theta: Sequence[float] = tuple(float(value) for value in rng.uniform(0.0, math.pi, size=d - 2))
    return GeodesicPolar(
        r=float(rng.uniform(0.0, r_max)),
        theta=theta,
        phi=float(rng.uniform(0.0, TWO_PI)),
    )
