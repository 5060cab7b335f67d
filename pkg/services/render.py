import logging
import math
from dataclasses import dataclass, field
from html import escape
from typing import List, Sequence, Tuple

import numpy as np

from dataset.loader import normalize
from dataset.models import Dataset, ScatterplotSpec
from services.geometry import TriMesh
from services.metrics import METRIC_NAMES, ScoreVector
from services.selection import SelectionResult

logger = logging.getLogger("scatterpick.render")

BLUE = "#1f5fbf"
RED = "#d62728"
CLASS_CYCLE = ("#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
METRIC_COLORS = ("#4c72b0", "#dd8452", "#55a868", "#c44e52")

FONT = "font-family=\"Helvetica, Arial, sans-serif\""


class RenderError(ValueError):
    """Raised when there is nothing to draw."""


@dataclass(frozen=True)
class PlotStyle:
    plot_size: float = 200.0
    margin: float = 30.0
    point_radius: float = 2.0
    columns: int = 4
    palette: Tuple[str, ...] = field(default=(BLUE, RED))

    def __post_init__(self):
        for name in ("plot_size", "margin", "point_radius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.columns < 1:
            raise ValueError(f"columns must be >= 1, got {self.columns}")

    @property
    def cell_size(self) -> float:
        return self.plot_size + 2 * self.margin

    def class_color(self, code: int) -> str:
        if code < len(self.palette):
            return self.palette[code]
        return CLASS_CYCLE[(code - len(self.palette)) % len(CLASS_CYCLE)]

    def to_viewport(self, x: float, y: float) -> Tuple[float, float]:
        """Maps a normalized point into its sub-plot; y grows upward."""
        return self.margin + x * self.plot_size, self.margin + (1.0 - y) * self.plot_size


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _document(width: float, height: float, body: List[str]) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]
    return "\n".join(head + body + ["</svg>", ""])


def score_caption(score: ScoreVector) -> str:
    return "/".join(_fmt(value) for value in score.as_tuple())


def _subplot(d: Dataset, spec: ScatterplotSpec, score: ScoreVector, style: PlotStyle, left: float, top: float) -> List[str]:
    size = style.plot_size
    x_name = escape(d.dim_names[spec.x_dim])
    y_name = escape(d.dim_names[spec.y_dim])
    lines = [
        f'<g id="plot-{spec.id}" transform="translate({_fmt(left)},{_fmt(top)})">',
        f'<rect x="{_fmt(style.margin)}" y="{_fmt(style.margin)}" width="{_fmt(size)}" height="{_fmt(size)}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>',
        f'<text class="caption" x="{_fmt(style.margin + size / 2)}" y="{_fmt(style.margin - 8)}" '
        f'text-anchor="middle" font-size="11" {FONT}>s1/s2/s3/s4 {score_caption(score)}</text>',
        f'<text class="x-axis" x="{_fmt(style.margin + size / 2)}" y="{_fmt(style.margin + size + 18)}" '
        f'text-anchor="middle" font-size="12" {FONT}>{x_name}</text>',
        f'<text class="y-axis" x="{_fmt(style.margin - 10)}" y="{_fmt(style.margin + size / 2)}" '
        f'text-anchor="middle" font-size="12" {FONT} '
        f'transform="rotate(-90 {_fmt(style.margin - 10)} {_fmt(style.margin + size / 2)})">{y_name}</text>',
    ]
    xs = d.column(spec.x_dim)
    ys = d.column(spec.y_dim)
    radius = _fmt(style.point_radius)
    for x, y, label in zip(xs.tolist(), ys.tolist(), d.labels.tolist()):
        cx, cy = style.to_viewport(x, y)
        lines.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{radius}" fill="{style.class_color(label)}" fill-opacity="0.7"/>')
    lines.append("</g>")
    return lines


def grid_shape(count: int, columns: int) -> Tuple[int, int]:
    """(rows, columns actually used) of a row-major layout."""
    used = min(count, columns)
    return math.ceil(count / columns), used


def render_grid(
    d: Dataset,
    specs: Sequence[ScatterplotSpec],
    scores: Sequence[ScoreVector],
    result: SelectionResult,
    style: PlotStyle = PlotStyle(),
) -> str:
    """One sub-plot per selected scatterplot in rank order, filled row by row."""
    if not result.selected:
        raise RenderError("selection is empty: nothing to render")
    d = normalize(d)
    rows, cols = grid_shape(len(result.selected), style.columns)
    cell = style.cell_size

    body: List[str] = []
    for rank, plot_id in enumerate(result.selected):
        row, col = divmod(rank, style.columns)
        body.extend(_subplot(d, specs[plot_id], scores[plot_id], style, col * cell, row * cell))

    logger.info(f"🖼️ Rendered {len(result.selected)} scatterplots in a {rows}x{cols} grid")
    return _document(cols * cell, rows * cell, body)


def render_score_chart(
    scores: Sequence[ScoreVector],
    selected: Sequence[int],
    bar_width: float = 10.0,
    chart_height: float = 200.0,
    margin: float = 40.0,
) -> str:
    """Grouped bar chart of s1..s4 for each selected scatterplot on a [0, 1] axis."""
    group_gap = bar_width * 2
    group_width = bar_width * len(METRIC_NAMES) + group_gap
    width = 2 * margin + max(len(selected), 1) * group_width
    height = chart_height + 2 * margin
    baseline = margin + chart_height

    body: List[str] = []
    for tick in (0.0, 0.5, 1.0):
        y = baseline - tick * chart_height
        body.append(f'<line x1="{_fmt(margin)}" y1="{_fmt(y)}" x2="{_fmt(width - margin)}" y2="{_fmt(y)}" stroke="#cccccc" stroke-width="1"/>')
        body.append(f'<text x="{_fmt(margin - 6)}" y="{_fmt(y + 4)}" text-anchor="end" font-size="10" {FONT}>{tick:.1f}</text>')

    for slot, plot_id in enumerate(selected):
        left = margin + slot * group_width + group_gap / 2
        body.append(f'<g class="group" id="scores-{plot_id}">')
        for index, value in enumerate(scores[plot_id].as_tuple()):
            bar_height = value * chart_height
            body.append(
                f'<rect class="bar {METRIC_NAMES[index]}" x="{_fmt(left + index * bar_width)}" y="{_fmt(baseline - bar_height)}" '
                f'width="{_fmt(bar_width)}" height="{_fmt(bar_height)}" fill="{METRIC_COLORS[index]}"/>'
            )
        body.append(
            f'<text x="{_fmt(left + 2 * bar_width)}" y="{_fmt(baseline + 14)}" text-anchor="middle" font-size="10" {FONT}>#{plot_id}</text>'
        )
        body.append("</g>")

    for index, name in enumerate(METRIC_NAMES):
        x = margin + index * 50
        body.append(f'<rect x="{_fmt(x)}" y="{_fmt(margin / 2 - 8)}" width="10" height="10" fill="{METRIC_COLORS[index]}"/>')
        body.append(f'<text x="{_fmt(x + 14)}" y="{_fmt(margin / 2)}" font-size="10" {FONT}>{name}</text>')

    return _document(width, height, body)


def render_mesh(mesh: TriMesh, size: float = 400.0, margin: float = 10.0) -> str:
    """Kept edges of a pruned mesh as line segments, boundary edges highlighted."""
    def to_canvas(point: np.ndarray) -> Tuple[float, float]:
        return margin + point[0] * size, margin + (1.0 - point[1]) * size

    boundary = {tuple(edge) for edge in mesh.boundary_edges.tolist()}
    body: List[str] = []
    for edge in mesh.kept_edges.tolist():
        (x1, y1), (x2, y2) = to_canvas(mesh.points[edge[0]]), to_canvas(mesh.points[edge[1]])
        stroke = RED if tuple(edge) in boundary else "#888888"
        body.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="{stroke}" stroke-width="0.8"/>')
    for point in mesh.points:
        cx, cy = to_canvas(point)
        body.append(f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="1.5" fill="{BLUE}"/>')
    return _document(size + 2 * margin, size + 2 * margin, body)
