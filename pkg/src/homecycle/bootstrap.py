"""Stationary block bootstrap of per-household economic environments.

Blocks of consecutive years are drawn from a uniformly chosen country with
geometric lengths (mean 10). A block that would run past the end of its
series is truncated there and a fresh block is drawn; the final block is
truncated to complete the 75-year horizon. No wrap-around.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from homecycle.constants import HORIZON, MEAN_BLOCK_YEARS
from homecycle.panel import MacroPanel

GEOMETRIC_P = 1.0 / MEAN_BLOCK_YEARS


@dataclass
class EconomicPath:
    """One household's bootstrapped market history.

    row_indices index into MacroPanel.matrix; country_idx / source_years
    record provenance, block_starts the indices where new blocks begin.
    """

    row_indices: np.ndarray     # (horizon,) int64
    country_idx: np.ndarray     # (horizon,) int32
    source_years: np.ndarray    # (horizon,) int32
    block_starts: np.ndarray    # (n_blocks,) int32, first entry 0

    def __len__(self) -> int:
        return len(self.row_indices)


def draw_block_length(rng: np.random.Generator) -> int:
    """Geometric block length, support k >= 1, mean MEAN_BLOCK_YEARS."""
    return int(rng.geometric(GEOMETRIC_P))


def sample_path(panel: MacroPanel, horizon: int = HORIZON, rng: np.random.Generator | None = None) -> EconomicPath:
    """Concatenate bootstrap blocks until `horizon` years are collected.

    Each block: country uniform, start year uniform within the country,
    length geometric, truncated at the series end; the last block is
    truncated to land exactly on `horizon`.
    """
    if rng is None:
        raise ValueError("an explicit rng is required for reproducibility")
    if panel.n_countries == 0:
        raise ValueError("empty panel")

    rows = np.empty(horizon, dtype=np.int64)
    countries = np.empty(horizon, dtype=np.int32)
    years = np.empty(horizon, dtype=np.int32)
    block_starts = []

    filled = 0
    n_countries = panel.n_countries
    offsets = panel.country_offsets
    lengths = panel.country_lengths
    first_years = panel.country_first_years

    while filled < horizon:
        c = int(rng.integers(0, n_countries))
        n_years = int(lengths[c])
        start = int(rng.integers(0, n_years))
        drawn = int(rng.geometric(GEOMETRIC_P))
        take = min(drawn, n_years - start, horizon - filled)

        block_starts.append(filled)
        sl = slice(filled, filled + take)
        rows[sl] = offsets[c] + start + np.arange(take)
        countries[sl] = c
        years[sl] = first_years[c] + start + np.arange(take)
        filled += take

    return EconomicPath(
        row_indices=rows,
        country_idx=countries,
        source_years=years,
        block_starts=np.asarray(block_starts, dtype=np.int32),
    )


def path_to_csv(path: EconomicPath, panel: MacroPanel, out_path) -> None:
    """Debug dump of one path as CSV."""
    import pandas as pd

    from homecycle.panel import FIELD_COLUMNS

    df = pd.DataFrame(panel.matrix[path.row_indices], columns=FIELD_COLUMNS)
    df.insert(0, "source_year", path.source_years)
    df.insert(0, "country", [panel.country_codes[c] for c in path.country_idx])
    starts = np.zeros(len(path), dtype=bool)
    starts[path.block_starts] = True
    df.insert(0, "block_start", starts)
    df.to_csv(out_path, index=False)
