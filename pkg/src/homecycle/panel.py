"""Loading and validation of the multi-country annual macro-financial panel.

The canonical input is one long-format CSV with a row per (country, year).
Returns are decimal fractions (0.05 = 5%), HPI is a house-price-to-income
ratio after rescaling, and the wage index is retained for level anchoring
only. Series must be gap-free once they begin; leading rows with missing
fields are dropped, anything later is an error.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from homecycle.constants import (
    DEFAULT_EXCLUDED,
    HPI_ANCHOR_VALUE,
    HPI_ANCHOR_YEAR,
    HPI_REFERENCE_COUNTRY,
    REGION_ALIASES,
)

REQUIRED_COLUMNS = [
    "country",
    "year",
    "stock_return",
    "bond_return",
    "housing_return",
    "rental_yield",
    "hpi",
    "inflation",
    "wage_index",
]

FIELD_COLUMNS = REQUIRED_COLUMNS[2:]

# Column order of MacroPanel.matrix
MAT_STOCK, MAT_BOND, MAT_HOUSE, MAT_RENT, MAT_HPI, MAT_INFL, MAT_WAGE = range(7)


class PanelError(ValueError):
    """Raised for schema, gap, or range problems in the input panel."""


@dataclass
class CountrySeries:
    """Gap-free annual series for one country."""

    country_code: str
    first_year: int
    data: pd.DataFrame  # indexed 0..n-1, columns FIELD_COLUMNS plus year

    @property
    def years(self) -> np.ndarray:
        return self.data["year"].to_numpy()

    @property
    def last_year(self) -> int:
        return int(self.data["year"].iloc[-1])

    def __len__(self) -> int:
        return len(self.data)


@dataclass
class MacroPanel:
    """Immutable panel of CountrySeries plus flat arrays for fast sampling."""

    countries: list[CountrySeries]
    report: str = ""
    fingerprint: str = ""
    # Flat layout, filled by _finalize: matrix[row, field], country_offsets[i]
    matrix: np.ndarray = field(default=None, repr=False)
    country_codes: list[str] = field(default_factory=list)
    country_offsets: np.ndarray = field(default=None, repr=False)
    country_lengths: np.ndarray = field(default=None, repr=False)
    country_first_years: np.ndarray = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self._finalize()

    def _finalize(self) -> None:
        self.country_codes = [c.country_code for c in self.countries]
        lengths = np.array([len(c) for c in self.countries], dtype=np.int64)
        offsets = np.concatenate([[0], np.cumsum(lengths)[:-1]]) if len(lengths) else np.zeros(0, np.int64)
        rows = []
        for c in self.countries:
            rows.append(c.data[FIELD_COLUMNS].to_numpy(dtype=np.float64))
        self.matrix = np.vstack(rows) if rows else np.zeros((0, len(FIELD_COLUMNS)))
        self.country_offsets = offsets
        self.country_lengths = lengths
        self.country_first_years = np.array([c.first_year for c in self.countries], dtype=np.int64)

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    def series(self, code: str) -> CountrySeries:
        return self.countries[self.country_codes.index(code)]

    def year_of_row(self, country_idx: int, year_offset: int) -> int:
        return int(self.country_first_years[country_idx]) + int(year_offset)


def to_real(nominal_return: float, inflation: float):
    """Deflate a nominal return: (1+nominal)/(1+inflation) - 1.

    Accepts scalars or numpy arrays.
    """
    inflation = np.asarray(inflation, dtype=np.float64)
    if np.any(inflation <= -1.0):
        raise ValueError("inflation must exceed -1")
    out = (1.0 + np.asarray(nominal_return, dtype=np.float64)) / (1.0 + inflation) - 1.0
    return out if out.ndim else float(out)


def _resolve_filter(country_filter) -> set[str] | None:
    if country_filter is None:
        return None
    if isinstance(country_filter, str):
        key = country_filter.strip().lower()
        if key in REGION_ALIASES:
            return set(REGION_ALIASES[key])
        return {c.strip().upper() for c in country_filter.split(",") if c.strip()}
    return {str(c).upper() for c in country_filter}


def _read_raw(data_dir: Path) -> pd.DataFrame:
    """Read the long-format CSV (single file, or all CSVs in a directory)."""
    path = Path(data_dir)
    if path.is_file():
        files = [path]
    elif path.is_dir():
        canonical = path / "panel.csv"
        files = [canonical] if canonical.exists() else sorted(path.glob("*.csv"))
        if not files:
            raise PanelError(f"no CSV files found under {path}")
    else:
        raise PanelError(f"panel input not found: {path}")

    frames = []
    for f in files:
        df = pd.read_csv(f, float_precision="round_trip")
        missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise PanelError(f"{f.name}: missing required column(s): {', '.join(missing)}")
        frames.append(df[REQUIRED_COLUMNS])
    return pd.concat(frames, ignore_index=True)


def _validate_ranges(code: str, df: pd.DataFrame) -> None:
    for col in ("stock_return", "bond_return", "housing_return", "inflation"):
        bad = df[df[col] <= -1.0]
        if len(bad):
            y = int(bad["year"].iloc[0])
            raise PanelError(f"{code} {y}: {col} must exceed -1")
    if (df["rental_yield"] < 0).any():
        y = int(df.loc[df["rental_yield"] < 0, "year"].iloc[0])
        raise PanelError(f"{code} {y}: rental_yield must be >= 0")
    if (df["hpi"] <= 0).any():
        y = int(df.loc[df["hpi"] <= 0, "year"].iloc[0])
        raise PanelError(f"{code} {y}: hpi must be > 0")


def load_panel(data_dir, country_filter=None, excluded=DEFAULT_EXCLUDED) -> MacroPanel:
    """Load, validate, and assemble the macro panel.

    Canada and Ireland are excluded by default; `country_filter` (set of
    codes, comma list, or region alias 'us'/'uk'/'europe') restricts further.
    Leading rows with any missing field are dropped per country; a missing
    field or a year gap after the first complete year is an error.
    """
    raw = _read_raw(Path(data_dir))
    wanted = _resolve_filter(country_filter)

    report_lines = ["panel validation report"]
    all_codes = sorted(raw["country"].astype(str).str.upper().unique())
    kept_excluded = sorted(set(all_codes) & set(excluded))
    if kept_excluded:
        report_lines.append(f"excluded by default: {', '.join(kept_excluded)}")
    if wanted is not None:
        report_lines.append(f"country filter: {', '.join(sorted(wanted))}")

    series: list[CountrySeries] = []
    for code in all_codes:
        if code in excluded:
            continue
        if wanted is not None and code not in wanted:
            continue
        df = raw[raw["country"].astype(str).str.upper() == code].copy()
        df = df.sort_values("year").reset_index(drop=True)
        if df["year"].duplicated().any():
            y = int(df.loc[df["year"].duplicated(), "year"].iloc[0])
            raise PanelError(f"{code}: duplicate year {y}")

        complete = df[FIELD_COLUMNS].notna().all(axis=1)
        if not complete.any():
            report_lines.append(f"{code}: no complete rows, dropped entirely")
            continue
        first_idx = int(np.argmax(complete.to_numpy()))
        if first_idx > 0:
            report_lines.append(
                f"{code}: dropped {first_idx} incomplete leading row(s) before {int(df['year'].iloc[first_idx])}"
            )
        df = df.iloc[first_idx:].reset_index(drop=True)

        if df[FIELD_COLUMNS].isna().any().any():
            bad_row = df[df[FIELD_COLUMNS].isna().any(axis=1)].iloc[0]
            raise PanelError(f"{code} {int(bad_row['year'])}: missing field after series start")

        years = df["year"].to_numpy(dtype=np.int64)
        gaps = np.flatnonzero(np.diff(years) != 1)
        if len(gaps):
            raise PanelError(f"{code}: year gap after {int(years[gaps[0]])}")

        _validate_ranges(code, df)
        series.append(CountrySeries(country_code=code, first_year=int(years[0]), data=df))

    if not series:
        raise PanelError("no countries retained after exclusions/filter")

    for s in series:
        report_lines.append(f"{s.country_code}: {s.first_year}-{s.last_year} ({len(s)} years)")
    report_lines.append(f"retained {len(series)} countries")

    fingerprint = hashlib.sha256(
        pd.concat([s.data for s in series], ignore_index=True).to_csv(index=False).encode()
    ).hexdigest()

    return MacroPanel(countries=series, report="\n".join(report_lines), fingerprint=fingerprint)


def rescale_hpi(
    panel: MacroPanel,
    anchor_year: int = HPI_ANCHOR_YEAR,
    anchor_value: float = HPI_ANCHOR_VALUE,
    reference_country: str = HPI_REFERENCE_COUNTRY,
) -> MacroPanel:
    """Rescale all HPI series by one scalar so the reference country's
    anchor-year HPI equals anchor_value. Cross-year ratios are unchanged."""
    try:
        ref = panel.series(reference_country)
    except ValueError:
        raise PanelError(f"reference country {reference_country} not in panel")
    years = ref.years
    if anchor_year not in years:
        raise PanelError(f"anchor year {anchor_year} absent from {reference_country} series")
    current = float(ref.data.loc[ref.data["year"] == anchor_year, "hpi"].iloc[0])
    scalar = anchor_value / current

    rescaled = []
    for s in panel.countries:
        df = s.data.copy()
        df["hpi"] = df["hpi"] * scalar
        rescaled.append(CountrySeries(s.country_code, s.first_year, df))
    report = panel.report + f"\nhpi rescaled by {scalar!r} ({reference_country} {anchor_year} -> {anchor_value})"
    return MacroPanel(countries=rescaled, report=report, fingerprint=panel.fingerprint)


def write_panel_csv(panel: MacroPanel, path) -> None:
    """Write the panel back to long-format CSV. Floats use repr so a
    reload reproduces values bit-for-bit."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(REQUIRED_COLUMNS) + "\n")
        for s in panel.countries:
            for _, row in s.data.iterrows():
                vals = [s.country_code, str(int(row["year"]))]
                vals += [repr(float(row[c])) for c in FIELD_COLUMNS]
                fh.write(",".join(vals) + "\n")


def default_panel_path() -> Path:
    """Path of the bundled panel CSV."""
    return Path(__file__).parent / "data" / "default_panel.csv"
