"""
Parameters shared by the geometry, kernel and verification modules.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_DIMENSION = 2
MAX_DIMENSION = 12
DEFAULT_TOL_REL = 1e-10
DEFAULT_RHO_MIN = 1e-6


def normalize_dimension(value: object) -> int:
    """
    Coerce a dimension to int and check it against the supported range.
    """
    try:
        dim = int(value)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ValueError(f"Dimension must be an integer, got {value!r}.") from exc
    if dim != value and not isinstance(value, str):
        raise ValueError(f"Dimension must be an integer, got {value!r}.")
    if not MIN_DIMENSION <= dim <= MAX_DIMENSION:
        raise ValueError(
            f"Unsupported dimension {dim}. Expected {MIN_DIMENSION} <= d <= {MAX_DIMENSION}."
        )
    return dim


@dataclass(frozen=True)
class KernelParams:
    """
    Dimension, radius and evaluation tolerances of the R-radius hyperboloid H_R^d.
    """

    d: int
    R: float = 1.0
    tol_rel: float = DEFAULT_TOL_REL
    rho_min: float = DEFAULT_RHO_MIN

    def __post_init__(self) -> None:
        object.__setattr__(self, "d", normalize_dimension(self.d))
        radius = float(self.R)
        if not radius > 0.0 or radius == float("inf"):
            raise ValueError(f"Radius must be a positive finite number, got {self.R!r}.")
        object.__setattr__(self, "R", radius)
        if not float(self.tol_rel) > 0.0:
            raise ValueError(f"tol_rel must be positive, got {self.tol_rel!r}.")
        if not float(self.rho_min) > 0.0:
            raise ValueError(f"rho_min must be positive, got {self.rho_min!r}.")
        object.__setattr__(self, "tol_rel", float(self.tol_rel))
        object.__setattr__(self, "rho_min", float(self.rho_min))

    @property
    def ambient_dimension(self) -> int:
        return self.d + 1

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "R": self.R,
            "tol_rel": self.tol_rel,
            "rho_min": self.rho_min,
        }
