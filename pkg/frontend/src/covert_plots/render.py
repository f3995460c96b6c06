"""Figure renderers for the twoway-covert CSV tables.

These are pure views: every number that appears in a figure is read
from a CSV; nothing is recomputed. Figures are saved as SVG by default
(any extension matplotlib understands works).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

PTS_COLUMNS = ["lambda", "delta1_frac", "r1", "r2"]
CAPACITY_COLUMNS = ["lambda", "r1", "r2", "c_lambda"]
SCALING_COLUMNS = ["n", "quantity", "exact", "leading", "fit_slope", "fit_r2"]


class FigureKind(enum.Enum):
    REGIONS = "regions"
    SCALING = "scaling"


@dataclass(frozen=True)
class PlotJob:
    """One figure to render from one or two input tables."""

    inputs: tuple[str, ...]
    kind: FigureKind
    out_path: str

    def run(self):
        if self.kind is FigureKind.REGIONS:
            return render_regions(*self.inputs, self.out_path)
        return render_scaling(*self.inputs, self.out_path)


def _read(path: str, columns: list[str], min_rows: int = 1) -> pd.DataFrame:
    df = pd.read_csv(path)
    if list(df.columns) != columns:
        raise ValueError(
            f"{path}: expected header {','.join(columns)}, "
            f"got {','.join(df.columns)}")
    if len(df) < min_rows:
        raise ValueError(f"{path}: needs at least {min_rows} data row(s), "
                         f"got {len(df)}")
    return df


def render_regions(pts_csv: str, capacity_csv: str, out_path: str):
    """Plot both rate-region boundaries (r1 horizontal, r2 vertical)."""
    pts = _read(pts_csv, PTS_COLUMNS)
    cap = _read(capacity_csv, CAPACITY_COLUMNS)
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    ax.plot(cap["r1"], cap["r2"], label="$C$", color="tab:blue")
    ax.plot(pts["r1"], pts["r2"], label="$C_{PTS}$", color="tab:orange",
            linestyle="--")
    ax.set_xlabel("$r_1$")
    ax.set_ylabel("$r_2$")
    ax.legend()
    ax.set_title("Covert rate regions")
    fig.savefig(out_path)
    return fig


def render_scaling(scaling_csv: str, out_path: str):
    """Log-log plot of the exact quantity vs n, fitted slope annotated."""
    df = _read(scaling_csv, SCALING_COLUMNS, min_rows=2)
    fig, ax = plt.subplots(figsize=(5.2, 4.2))
    quantity = df["quantity"].iloc[0]
    ax.plot(df["n"], df["exact"], marker="o", label=quantity)
    leading = df["leading"]
    if (leading > 0).any():
        ax.plot(df["n"], leading, linestyle=":", label="leading order")
    ax.set_xscale("log")
    if (df["exact"] > 0).all():
        ax.set_yscale("log")
    ax.set_xlabel("$n$")
    ax.set_ylabel(quantity)
    slope = df["fit_slope"].iloc[0]
    ax.annotate(f"fitted slope {slope:.4g}", xy=(0.05, 0.08),
                xycoords="axes fraction")
    ax.legend()
    fig.savefig(out_path)
    return fig
