"""Deterministic SVG figures (scatter plus overlay lines) via matplotlib.

Artists carry gids so a figure's structure can be checked from the SVG:
``points`` for the scatter group and ``line_<label>`` for each overlay line.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .errors import ValidationError

SALT = "dislocation-lab"


def _finite(name, values):
    arr = np.asarray(values, dtype=float)
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValidationError(f"non-finite coordinate in {name}")
    return arr


def emit_svg_scatter(points, lines, xlabel: str, ylabel: str, path, title: str = "",
                     series: dict | None = None) -> Path:
    """Scatter ``points`` [(x, y), ...] over ``lines`` {label: (xs, ys)}.

    ``series`` optionally adds further named line plots (e.g. dispersion
    curves) drawn solid; ``lines`` are drawn dashed as predictions.
    """
    pts = _finite("points", points).reshape(-1, 2)
    path = Path(path)
    with matplotlib.rc_context({"svg.hashsalt": SALT, "svg.fonttype": "none"}):
        fig = Figure(figsize=(6.0, 4.5))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        for label, (xs, ys) in (series or {}).items():
            ax.plot(_finite(label, xs), _finite(label, ys), lw=1.2, gid=f"series_{label}")
        for label, (xs, ys) in lines.items():
            ax.plot(_finite(label, xs), _finite(label, ys), ls="--", lw=0.8, color="0.4",
                    gid=f"line_{label}")
        if len(pts):
            ax.scatter(pts[:, 0], pts[:, 1], s=14, color="C3", zorder=3, gid="points")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path
