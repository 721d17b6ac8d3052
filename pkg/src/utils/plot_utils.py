"""
Matplotlib helpers for the SVG charts.

A canvas maps one data unit to one point, with the origin in the top-left
corner, so the drawing code can work in plain SVG coordinates. Saving pins
the hash salt and drops the timestamp, which keeps repeated runs
byte-identical.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as pyplot
from matplotlib.axes import Axes
from matplotlib.figure import Figure

from utils.config import TOOL_VERSION
from utils.io_utils import ensure_parent


CREATOR = f"emoji-solidarity-analytics {TOOL_VERSION}"

SVG_RC = {
    "svg.hashsalt": "emoji-solidarity-analytics",
    "svg.fonttype": "none",
}

POINTS_PER_INCH = 72


def new_canvas(width: float, height: float) -> Tuple[Figure, Axes]:
    """
    Open a figure whose single axes spans the whole canvas.

    Args:
        width: Canvas width in points.
        height: Canvas height in points.

    Returns:
        ``(figure, axes)`` with y growing downwards.
    """
    fig = pyplot.figure(figsize=(width / POINTS_PER_INCH, height / POINTS_PER_INCH), dpi=POINTS_PER_INCH)
    ax = fig.add_axes((0.0, 0.0, 1.0, 1.0))
    ax.set_xlim(0.0, width)
    ax.set_ylim(height, 0.0)
    ax.set_axis_off()
    return fig, ax


def save_svg(fig: Figure, path: str | Path, title: str = "") -> Path:
    """
    Write a figure as SVG and close it.

    The creator metadata carries the tool version.

    Args:
        fig: Figure from :func:`new_canvas`.
        path: Destination file.
        title: Optional document title.

    Returns:
        Written path.
    """
    path = ensure_parent(path)
    metadata = {"Creator": CREATOR, "Date": None}
    if title:
        metadata["Title"] = title

    try:
        with matplotlib.rc_context(SVG_RC), warnings.catch_warnings():
            # Emoji labels are written as text; the default font has no glyphs to measure them with.
            warnings.filterwarnings("ignore", message=r"Glyph \d+ .*missing from")
            fig.savefig(path, format="svg", metadata=metadata)
    finally:
        pyplot.close(fig)
    return path
