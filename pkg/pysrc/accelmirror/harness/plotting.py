"""
Log-log convergence plots.

Importing this module requires plotly (the ``plot`` extra). Static SVG export
additionally needs kaleido; without it the figure is written as HTML next to
the requested path.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

try:
    import plotly.graph_objects as go
except ImportError as exc:
    raise ImportError(
        "Plotly is not installed. Install accelmirror[plot] to use the plotting features."
    ) from exc

from .._trace import TraceRecord

logger = logging.getLogger(__name__)

GUIDE_SLOPES: tuple[tuple[float, str], ...] = ((-1.0, "1/k"), (-2.0, "1/k^2"))

_COLORS = {
    "mirror_descent": "#1f77b4",
    "amd": "#d62728",
    "amdr": "#2ca02c",
}
_FALLBACK_COLORS = ["#ff7f0e", "#9467bd", "#8c564b", "#e377c2"]


def _positive_points(records: Sequence[TraceRecord]) -> tuple[list[int], list[float]]:
    ks = [r.k for r in records if r.k >= 1 and r.f_gap > 0.0]
    gaps = [r.f_gap for r in records if r.k >= 1 and r.f_gap > 0.0]
    return ks, gaps


def create_figure(traces: Mapping[str, Sequence[TraceRecord]], title: str = "") -> go.Figure:
    """
    One polyline per algorithm on log-log axes, plus dotted guides of slope -1 and -2.

    Raises:
        ValueError: If ``traces`` is empty.
    """
    if not traces:
        raise ValueError("nothing to plot: no traces given")
    fig = go.Figure()
    anchor_k, anchor_gap = 1, 1.0
    k_max = 1
    for i, (name, records) in enumerate(traces.items()):
        ks, gaps = _positive_points(records)
        color = _COLORS.get(name, _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)])
        fig.add_trace(
            go.Scatter(
                x=ks,
                y=gaps,
                name=name,
                mode="lines",
                line={"color": color, "width": 2},
            )
        )
        if ks:
            k_max = max(k_max, ks[-1])
            if i == 0:
                anchor_k, anchor_gap = ks[0], gaps[0]

    guide_k = np.array([max(1, anchor_k), max(2, k_max)], dtype=np.float64)
    for slope, label in GUIDE_SLOPES:
        fig.add_trace(
            go.Scatter(
                x=guide_k.tolist(),
                y=(anchor_gap * (guide_k / guide_k[0]) ** slope).tolist(),
                name=label,
                mode="lines",
                line={"color": "#7f7f7f", "width": 1, "dash": "dot"},
            )
        )

    fig.update_xaxes(title_text="k", type="log")
    fig.update_yaxes(title_text="f(x_k) - f(x*)", type="log", tickformat=".0e")
    fig.update_layout(
        title={"text": title, "x": 0.5, "xanchor": "center"},
        template="plotly_white",
        legend={"orientation": "h", "x": 0.5, "xanchor": "center", "y": 1.08},
        margin={"l": 60, "r": 20, "t": 80, "b": 50},
        height=520,
        width=760,
    )
    return fig


def emit_plot(
    traces: Mapping[str, Sequence[TraceRecord]], path: str | Path, title: str = ""
) -> Path:
    """
    Write the convergence plot and return the file actually written.

    ``.svg`` paths go through kaleido; if it is unavailable (or the suffix is
    ``.html``) an HTML file is written instead.

    Raises:
        ValueError: If ``traces`` is empty.
        OSError: If the destination is not writable.
    """
    fig = create_figure(traces, title)
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if out.suffix.lower() != ".html":
        try:
            fig.write_image(str(out))
        except (ImportError, ValueError, RuntimeError) as exc:
            fallback = out.with_suffix(".html")
            logger.warning("static export failed (%s); writing %s instead", exc, fallback)
            out = fallback
        else:
            logger.info("wrote %s", out)
            return out
    fig.write_html(str(out), include_plotlyjs="cdn")
    logger.info("wrote %s", out)
    return out
