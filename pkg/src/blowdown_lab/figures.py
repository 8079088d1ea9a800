"""Matplotlib rendering of the geography sweep.

Output is byte-deterministic: a fixed SVG hash salt, no date metadata, and
no timestamps.  The SVG root is sized width x height in points.
"""

from __future__ import annotations

import io
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .geography import SweepResult

__all__ = ["render_sweep_svg"]

_ROUTE_COLORS = {
    "construction2": "#1f77b4",
    "construction1_even": "#2ca02c",
    "construction1_odd": "#9467bd",
}


def render_sweep_svg(
    result: SweepResult, path: str, width: int = 800, height: int = 600
) -> None:
    """Scatter the verified lattice points over the shaded region with the
    half-Noether, Noether and c = (5/2)x - 2 reference lines."""
    x_hi = result.x_max + 0.75
    xs = [4 - 0.25, x_hi]
    with plt.rc_context({"svg.hashsalt": "blowdown-lab"}):
        fig, ax = plt.subplots(figsize=(width / 72, height / 72))
        ax.fill_between(
            xs,
            [x - 3 for x in xs],
            [(5 * x - 4) / 2 for x in xs],
            color="#1f77b4",
            alpha=0.08,
            linewidth=0,
        )
        ax.fill_between(
            xs,
            [x - 3 for x in xs],
            [2 * x - 6 for x in xs],
            color="#2ca02c",
            alpha=0.10,
            linewidth=0,
        )
        ax.plot(xs, [x - 3 for x in xs], "--", color="#444444", label="c = x - 3")
        ax.plot(xs, [2 * x - 6 for x in xs], "-.", color="#2ca02c", label="c = 2x - 6")
        ax.plot(
            xs,
            [(5 * x - 4) / 2 for x in xs],
            ":",
            color="#1f77b4",
            label="c = (5x - 4)/2",
        )
        for route in sorted({r.route for r in result.rows}):
            pts = [r for r in result.rows if r.route == route and r.status == "pass"]
            ax.plot(
                [r.x for r in pts],
                [r.c for r in pts],
                "o",
                markersize=3.5,
                color=_ROUTE_COLORS.get(route, "#333333"),
                linestyle="none",
                label=route,
            )
        failed = [r for r in result.rows if r.status != "pass"]
        if failed:
            ax.plot(
                [r.x for r in failed],
                [r.c for r in failed],
                "x",
                color="#d62728",
                linestyle="none",
                label="failed",
            )
        ax.set_xlabel("chi_h")
        ax.set_ylabel("c_1^2")
        ax.set_title(f"one-basic-class geography, chi_h <= {result.x_max}")
        ax.legend(loc="upper left", fontsize=9)
        ax.set_xlim(xs[0], xs[1])
        try:
            if path == "-":
                buf = io.StringIO()
                fig.savefig(buf, format="svg", metadata={"Date": None})
                sys.stdout.write(buf.getvalue())
            else:
                fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
