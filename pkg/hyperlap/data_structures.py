"""
Shared dataclasses used across the kernel, verification and table code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional


class EvalRoute(str, Enum):
    """
    Evaluation route for I_d(rho). The value doubles as the CLI ``--method`` name.
    """

    QUADRATURE = "quadrature"
    FINITE_SUM = "sum"
    HYP2F1 = "hyp2f1"
    HYP2F1_EULER = "hyp2f1-euler"
    LEGENDRE_Q = "legendre"
    AUTO = "auto"

    @classmethod
    def from_name(cls, name: str) -> "EvalRoute":
        key = (name or "").strip().lower().replace("_", "-")
        for route in cls:
            if route.value == key or route.name.lower().replace("_", "-") == key:
                return route
        choices = ", ".join(route.value for route in cls)
        raise ValueError(f"Unknown route {name!r}. Expected one of: {choices}.")

    @property
    def column(self) -> str:
        return TABLE_COLUMNS[self]


TABLE_COLUMNS: Dict[EvalRoute, str] = {
    EvalRoute.QUADRATURE: "I_quadrature",
    EvalRoute.FINITE_SUM: "I_sum",
    EvalRoute.HYP2F1: "I_hyp",
    EvalRoute.HYP2F1_EULER: "I_hyp_euler",
    EvalRoute.LEGENDRE_Q: "I_legendre",
}

TABLE_ROUTES: List[EvalRoute] = list(TABLE_COLUMNS)


@dataclass(frozen=True)
class EvalResult:
    """
    Value of I_d or of the kernel together with how it was obtained.
    """

    value: float
    route: EvalRoute
    est_error: float = 0.0
    imag_residue: float = 0.0

    def scaled(self, factor: float) -> "EvalResult":
        return EvalResult(
            value=self.value * factor,
            route=self.route,
            est_error=self.est_error * abs(factor),
            imag_residue=self.imag_residue * abs(factor),
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "route": self.route.value,
            "est_error": self.est_error,
            "imag_residue": self.imag_residue,
        }


@dataclass
class VerificationReport:
    """
    Outcome of one verification check for a single (d, R).
    """

    check_name: str
    d: int
    R: float
    max_residual: float
    tolerance_used: float
    grid: List[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance_used

    def to_line(self) -> str:
        return ",".join(
            [
                self.check_name,
                str(self.d),
                repr(float(self.R)),
                repr(float(self.max_residual)),
                repr(float(self.tolerance_used)),
                "true" if self.passed else "false",
            ]
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "check": self.check_name,
            "d": self.d,
            "R": self.R,
            "grid": list(self.grid),
            "max_residual": self.max_residual,
            "tolerance": self.tolerance_used,
            "pass": self.passed,
        }


REPORT_HEADER = "check,d,R,max_residual,tolerance,pass"


@dataclass
class TableRow:
    """
    One grid point of the cross-route table; routes that were skipped map to None.
    """

    rho: float
    value_per_route: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def max_rel_diff(self) -> float:
        values = [value for value in self.value_per_route.values() if value is not None]
        worst = 0.0
        for a, b in itertools.combinations(values, 2):
            scale = max(abs(a), abs(b))
            if scale > 0.0:
                worst = max(worst, abs(a - b) / scale)
        return worst

    def to_dict(self) -> Dict[str, object]:
        return {
            "rho": self.rho,
            "values": dict(self.value_per_route),
            "max_rel_diff": self.max_rel_diff,
        }
