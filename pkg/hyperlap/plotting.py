"""
SVG line chart of log10 I_d(rho) per evaluation route.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

from matplotlib.figure import Figure  # noqa: E402

from .data_structures import TABLE_ROUTES, TableRow  # noqa: E402

logger = logging.getLogger(__name__)

SVG_RC = {"svg.hashsalt": "hyperlap", "svg.fonttype": "none"}
LINE_STYLES = ["-", "--", "-.", ":", (0, (5, 1))]


def _log10_or_nan(value) -> float:
    if value is None or not value > 0.0:
        return math.nan
    return math.log10(value)


def build_figure(d: int, rows: List[TableRow]) -> Figure:
    fig = Figure(figsize=(7.0, 4.5))
    ax = fig.add_subplot(1, 1, 1)
    rhos = [row.rho for row in rows]
    for route, style in zip(TABLE_ROUTES, LINE_STYLES):
        values = [_log10_or_nan(row.value_per_route.get(route.column)) for row in rows]
        ax.plot(rhos, values, linestyle=style, linewidth=1.2, label=route.column)
    ax.set_xlabel("rho")
    ax.set_ylabel("log10 I_d(rho)")
    ax.set_title(f"I_{d}(rho) by route")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    return fig


def save_svg(d: int, rows: List[TableRow], path: Path) -> Path:
    """
    Write a self-contained SVG; identical inputs give identical bytes.
    """
    path = Path(path)
    fig = build_figure(d, rows)
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    logger.info("Wrote plot for d=%s to %s", d, path)
    return path
