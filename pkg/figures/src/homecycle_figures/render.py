"""Render strategy-grid heatmaps, age profiles, and portfolio-comparison
curves from homecycle result CSVs.

The renderer is a pass-through: heatmap cells are annotated with the exact
strings found in the CSV, so rendered values can be audited against the
source file by string comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

KINDS = ("heatmap", "age_profile", "comparison")


class SchemaError(ValueError):
    pass


@dataclass
class FigureSpec:
    input_csv: str
    kind: str
    output_path: str
    title: str = ""
    xlabel: str = "down payment fraction"
    ylabel: str = "purchase threshold fraction"
    value_columns: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")


def read_table(path) -> pd.DataFrame:
    """Read a result CSV, skipping '#' metadata lines; values stay as the
    original strings alongside parsed floats."""
    df = pd.read_csv(path, comment="#", dtype=str)
    if df.empty:
        raise SchemaError(f"{path}: no data rows")
    return df


def _require(df: pd.DataFrame, columns, path) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")


def render(spec: FigureSpec) -> Path:
    df = read_table(spec.input_csv)
    if spec.kind == "heatmap":
        fig = _render_heatmap(df, spec)
    elif spec.kind == "age_profile":
        fig = _render_age_profile(df, spec)
    else:
        fig = _render_comparison(df, spec)
    out = Path(spec.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata={})
    plt.close(fig)
    return out


def _render_heatmap(df: pd.DataFrame, spec: FigureSpec):
    _require(df, ["down_frac", "threshold_frac"], spec.input_csv)
    value_cols = spec.value_columns or [
        c for c in df.columns if c not in ("down_frac", "threshold_frac")
    ]
    _require(df, value_cols, spec.input_csv)
    downs = sorted(df["down_frac"].astype(float).unique())
    thresholds = sorted(df["threshold_frac"].astype(float).unique())

    fig, axes = plt.subplots(1, len(value_cols),
                             figsize=(5.2 * len(value_cols), 4.2), squeeze=False)
    for ax, col in zip(axes[0], value_cols):
        grid = np.full((len(thresholds), len(downs)), np.nan)
        text = np.empty((len(thresholds), len(downs)), dtype=object)
        for _, row in df.iterrows():
            i = thresholds.index(float(row["threshold_frac"]))
            j = downs.index(float(row["down_frac"]))
            grid[i, j] = float(row[col])
            text[i, j] = row[col]
        im = ax.imshow(grid, cmap="RdYlGn", aspect="auto", origin="lower")
        for i in range(len(thresholds)):
            for j in range(len(downs)):
                if text[i, j] is not None:
                    ax.text(j, i, text[i, j], ha="center", va="center", fontsize=6)
        ax.set_xticks(range(len(downs)), [f"{d:g}" for d in downs])
        ax.set_yticks(range(len(thresholds)), [f"{t:g}" for t in thresholds])
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.set_title(col)
        fig.colorbar(im, ax=ax, shrink=0.85)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def _render_age_profile(df: pd.DataFrame, spec: FigureSpec):
    needed = ["cell", "age", "mean_W_owner", "mean_F_owner", "mean_C_owner",
              "mean_W_renter", "mean_F_renter", "mean_C_renter"]
    _require(df, needed, spec.input_csv)
    cells = df["cell"].unique()
    panels = [("mean_W_owner", "mean_W_renter", "total wealth"),
              ("mean_F_owner", "mean_F_renter", "financial assets"),
              ("mean_C_owner", "mean_C_renter", "consumption")]
    fig, axes = plt.subplots(len(cells), 3, figsize=(12, 3.4 * len(cells)), squeeze=False)
    for r, cell in enumerate(cells):
        sub = df[df["cell"] == cell]
        age = sub["age"].astype(float)
        for c, (own_col, rent_col, label) in enumerate(panels):
            ax = axes[r][c]
            ax.plot(age, sub[own_col].astype(float) / 1e6, label="owner")
            ax.plot(age, sub[rent_col].astype(float) / 1e6, label="renter", linestyle="--")
            ax.set_title(f"{cell}: {label}")
            ax.set_xlabel("age")
            ax.set_ylabel("millions of 2024 USD")
            ax.legend()
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def _render_comparison(df: pd.DataFrame, spec: FigureSpec):
    _require(df, ["strategy", "year", "mean_log_wealth", "std_log_wealth"], spec.input_csv)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    for strategy, sub in df.groupby("strategy"):
        year = sub["year"].astype(float)
        ax1.plot(year, sub["mean_log_wealth"].astype(float), label=strategy)
        ax2.plot(year, sub["std_log_wealth"].astype(float), label=strategy)
    ax1.set_title("mean log wealth")
    ax2.set_title("std of log wealth")
    for ax in (ax1, ax2):
        ax.set_xlabel("year")
        ax.legend()
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig
