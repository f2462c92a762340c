"""
Cross-route tables of I_d(rho) on a log-spaced grid.
"""

from __future__ import annotations

import csv
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import List, Optional, TextIO

import numpy as np

from .data_structures import TABLE_ROUTES, TableRow
from .green_kernel import try_route
from .params import DEFAULT_RHO_MIN, DEFAULT_TOL_REL, normalize_dimension

logger = logging.getLogger(__name__)

CSV_HEADER = ["rho"] + [route.column for route in TABLE_ROUTES] + ["max_rel_diff"]


def log_grid(rho_min: float, rho_max: float, steps: int) -> List[float]:
    """
    Log-spaced grid with exact end points.
    """
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}.")
    if not 0.0 < rho_min < rho_max:
        raise ValueError(f"Need 0 < rho_min < rho_max, got {rho_min!r}, {rho_max!r}.")
    grid = [float(v) for v in np.geomspace(rho_min, rho_max, steps)]
    grid[0], grid[-1] = float(rho_min), float(rho_max)
    return grid


def build_row(d: int, rho: float, tol: float = DEFAULT_TOL_REL, rho_min: float = DEFAULT_RHO_MIN) -> TableRow:
    values = {}
    for route in TABLE_ROUTES:
        result = try_route(route, d, rho, tol, rho_min=rho_min)
        values[route.column] = None if result is None else result.value
    return TableRow(rho=rho, value_per_route=values)


def build_rows(
    d: int,
    grid: List[float],
    tol: float = DEFAULT_TOL_REL,
    *,
    rho_min: float = DEFAULT_RHO_MIN,
    max_workers: Optional[int] = None,
) -> List[TableRow]:
    """
    Evaluate every route at every grid point.

    Parameters
    ----------
    max_workers:
        Maximum number of worker threads. None means 1; the CLI resolves
        HYPERLAP_MAX_WORKERS before calling. Rows come back in grid order either way.
    """
    d = normalize_dimension(d)
    resolved_workers = 1 if max_workers is None else max(1, max_workers)

    if resolved_workers == 1 or len(grid) <= 1:
        return [build_row(d, rho, tol, rho_min) for rho in grid]

    results: List[Optional[TableRow]] = [None] * len(grid)
    with ThreadPoolExecutor(max_workers=resolved_workers) as executor:
        future_to_index = {
            executor.submit(build_row, d, rho, tol, rho_min): idx for idx, rho in enumerate(grid)
        }
        for future in as_completed(future_to_index):
            idx = future_to_index[future]
            results[idx] = future.result()
    return [row for row in results if row is not None]


def _cell(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_csv(rows: List[TableRow], handle: TextIO) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(
            [_cell(row.rho)]
            + [_cell(row.value_per_route.get(route.column)) for route in TABLE_ROUTES]
            + [_cell(row.max_rel_diff)]
        )


def save_csv(rows: List[TableRow], path: Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        write_csv(rows, handle)
    logger.info("Wrote %d rows to %s", len(rows), path)
    return path
