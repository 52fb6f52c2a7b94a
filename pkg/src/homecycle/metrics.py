"""Wealth, welfare, drawdown, and inequality statistics.

Welfare is CRRA utility over equivalence-scaled consumption plus a bequest
term on terminal wealth; utility levels are reported as equivalent wealth so
changes read in dollars. Drawdown and Gini follow the standard definitions,
with the Gini computed by the sort-based identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from homecycle.constants import (
    BEQUEST_CURVATURE,
    BEQUEST_INTENSITY,
    RISK_AVERSION,
    WORKING_YEARS,
)

WINDOWS = ("pre", "post", "lifetime")


def crra_term(consumption, alive_count, delta: float = RISK_AVERSION):
    """Per-year utility flow (C / sqrt(N))^(1-delta) / (1-delta)."""
    c = np.asarray(consumption, dtype=np.float64)
    n = np.asarray(alive_count, dtype=np.float64)
    return (c / np.sqrt(n)) ** (1.0 - delta) / (1.0 - delta)


def bequest_term(terminal_wealth, delta: float = RISK_AVERSION,
                 intensity: float = BEQUEST_INTENSITY, curvature: float = BEQUEST_CURVATURE):
    """Bequest utility a_q (W + b_q)^(1-delta) / (1-delta)."""
    w = np.asarray(terminal_wealth, dtype=np.float64)
    return intensity * (w + curvature) ** (1.0 - delta) / (1.0 - delta)


@dataclass(frozen=True)
class UtilityComponents:
    consumption_utility: float
    bequest_utility: float

    @property
    def total(self) -> float:
        return self.consumption_utility + self.bequest_utility

    @property
    def equivalent_wealth(self) -> float:
        return equivalent_wealth(self.total)


def utility_of_path(
    consumption: np.ndarray,
    alive_counts: np.ndarray,
    terminal_wealth: float,
    window: str = "lifetime",
    retirement_index: int = WORKING_YEARS,
    delta: float = RISK_AVERSION,
) -> UtilityComponents:
    """Utility of one household's consumption path over a window.

    'pre' covers working years only (no bequest); 'post' covers retirement
    years plus the bequest; 'lifetime' covers everything. Consumption must be
    positive in every counted year.
    """
    if window not in WINDOWS:
        raise ValueError(f"window must be one of {WINDOWS}")
    consumption = np.asarray(consumption, dtype=np.float64)
    alive_counts = np.asarray(alive_counts, dtype=np.float64)
    if window == "pre":
        sl = slice(0, min(retirement_index, len(consumption)))
    elif window == "post":
        sl = slice(retirement_index, len(consumption))
    else:
        sl = slice(0, len(consumption))
    c = consumption[sl]
    n = alive_counts[sl]
    live = n > 0
    if np.any(c[live] <= 0.0):
        raise ValueError("non-positive consumption in a lived year")
    cons_u = float(np.sum(crra_term(c[live], n[live], delta)))
    beq_u = float(bequest_term(terminal_wealth, delta)) if window in ("post", "lifetime") else 0.0
    return UtilityComponents(consumption_utility=cons_u, bequest_utility=beq_u)


def equivalent_wealth(utility, delta: float = RISK_AVERSION):
    """Wealth level whose one-shot CRRA value equals the given utility:
    V = ((1-delta) U)^(1/(1-delta))."""
    u = np.asarray(utility, dtype=np.float64)
    if delta > 1.0 and np.any(u >= 0.0):
        raise ValueError("utility must be negative for delta > 1")
    out = ((1.0 - delta) * u) ** (1.0 / (1.0 - delta))
    return out if out.ndim else float(out)


def wealth_change(owner_mean: float, renter_mean: float) -> float:
    """Relative change of mean owner wealth over mean renter wealth."""
    if renter_mean <= 0.0:
        raise ValueError("renter mean wealth must be positive")
    return owner_mean / renter_mean - 1.0


def max_drawdown(wealth_path, window: slice | None = None) -> float:
    """Largest peak-to-trough fractional decline within the window."""
    path = np.asarray(wealth_path, dtype=np.float64)
    if window is not None:
        path = path[window]
    if len(path) == 0:
        return 0.0
    if np.any(path < 0):
        raise ValueError("wealth path must be non-negative")
    peaks = np.maximum.accumulate(path)
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = np.where(peaks > 0, 1.0 - path / peaks, 0.0)
    return float(dd.max())


def gini(wealths) -> float:
    """Gini index via the sort-based O(n log n) identity."""
    y = np.sort(np.asarray(wealths, dtype=np.float64))
    n = len(y)
    if n == 0:
        raise ValueError("empty wealth vector")
    if np.any(y < 0):
        raise ValueError("wealths must be non-negative")
    total = y.sum()
    if total <= 0:
        raise ValueError("total wealth must be positive")
    i = np.arange(1, n + 1)
    return max(0.0, float((2.0 * np.sum(i * y)) / (n * total) - (n + 1.0) / n))


def gini_bruteforce(wealths) -> float:
    """O(n^2) definition, kept as the oracle for the sort-based identity."""
    y = np.asarray(wealths, dtype=np.float64)
    n = len(y)
    return float(np.abs(y[:, None] - y[None, :]).sum() / (2.0 * n * y.sum()))


def bracket_edges_to_labels(edges) -> list[str]:
    labels = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == 0:
            labels.append(f"<{hi:g}%")
        elif hi == 100:
            labels.append(f">={lo:g}%")
        else:
            labels.append(f"{lo:g}%-{hi:g}%")
    return labels


def bracket_report(values: dict, key: np.ndarray, edges=(0, 10, 20, 30, 40, 50, 90, 100)) -> dict:
    """Per-bracket means of outcome arrays, bracketed by percentiles of `key`.

    `values` maps column name -> array aligned with `key`. Returns
    {"labels": [...], "counts": [...], <column>: [...]} with None entries for
    empty brackets, plus best-percentile labels per column scanned over 5%
    bins.
    """
    key = np.asarray(key, dtype=np.float64)
    edges = list(edges)
    cuts = np.percentile(key, edges)
    labels = bracket_edges_to_labels(edges)
    out = {"labels": labels, "counts": []}
    masks = []
    for j in range(len(edges) - 1):
        lo, hi = cuts[j], cuts[j + 1]
        m = (key >= lo) & ((key < hi) if j < len(edges) - 2 else (key <= hi))
        masks.append(m)
        out["counts"].append(int(m.sum()))
    for name, arr in values.items():
        arr = np.asarray(arr, dtype=np.float64)
        out[name] = [float(arr[m].mean()) if m.any() else None for m in masks]

    # best 5%-wide percentile bin per outcome
    fine = np.arange(0, 101, 5)
    fine_cuts = np.percentile(key, fine)
    out["best_percentile"] = {}
    for name, arr in values.items():
        arr = np.asarray(arr, dtype=np.float64)
        best_label, best_val = None, -np.inf
        for j in range(len(fine) - 1):
            m = (key >= fine_cuts[j]) & ((key < fine_cuts[j + 1]) if j < len(fine) - 2 else (key <= fine_cuts[j + 1]))
            if m.any():
                v = float(arr[m].mean())
                if v > best_val:
                    best_val, best_label = v, f"{(fine[j] + fine[j + 1]) // 2}%"
        out["best_percentile"][name] = best_label
    return out
