"""Mortgage and reverse-mortgage mechanics, sale P&L, and the PLF grid.

Contracts are annual, fixed-rate, and rate-basis agnostic: the caller passes
the bond return it prices against (the simulator uses the nominal bond
return and deflates balances year by year).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import pandas as pd

from homecycle.constants import (
    MORTGAGE_SPREAD,
    MORTGAGE_TERM,
    REVERSE_MORTGAGE_SPREAD,
    RM_ORIGINATION_FLAT,
    RM_ORIGINATION_PCT,
    TRANSACTION_COST_RATE,
)


@dataclass
class Mortgage:
    balance: float
    rate: float
    remaining_term: int
    annual_payment: float


@dataclass
class ReverseMortgage:
    balance: float
    rate: float
    origination_costs: float


@dataclass
class Home:
    value: float
    is_primary: bool = True
    vacant_for_rent: bool = False


def annuity_payment(principal, rate, term: int = MORTGAGE_TERM):
    """Level payment amortizing `principal` at `rate` over `term` years.

    Broadcasts over numpy arrays; rate 0 degrades to principal/term.
    """
    principal = np.asarray(principal, dtype=np.float64)
    rate = np.asarray(rate, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        pay = principal * rate / (1.0 - (1.0 + rate) ** (-term))
    flat = principal / term
    out = np.where(rate == 0.0, flat, pay)
    return out if out.ndim else float(out)


def originate_mortgage(home_value: float, down_frac: float, bond_rate: float) -> Mortgage:
    """30-year fixed-rate mortgage on (1 - down_frac) of the home value."""
    if not 0.0 < down_frac <= 1.0:
        raise ValueError("down_frac must be in (0, 1]")
    if down_frac == 1.0:
        return Mortgage(balance=0.0, rate=0.0, remaining_term=0, annual_payment=0.0)
    if bond_rate <= -MORTGAGE_SPREAD:
        raise ValueError("bond rate too low to price a mortgage")
    rate = bond_rate + MORTGAGE_SPREAD
    principal = (1.0 - down_frac) * home_value
    return Mortgage(
        balance=principal,
        rate=rate,
        remaining_term=MORTGAGE_TERM,
        annual_payment=annuity_payment(principal, rate),
    )


def amortize_year(m: Mortgage) -> Mortgage:
    """Advance one year: accrue interest, apply the payment (smaller final
    payment when the balance runs out)."""
    if m.balance <= 0.0:
        return m
    accrued = m.balance * (1.0 + m.rate)
    payment = min(m.annual_payment, accrued)
    return replace(
        m,
        balance=accrued - payment,
        remaining_term=max(0, m.remaining_term - 1),
    )


@dataclass
class PlfTable:
    """Principal limit factors on an (age, rate) grid."""

    ages: np.ndarray
    rates: np.ndarray
    values: np.ndarray  # shape (len(ages), len(rates))


def load_plf_table(path) -> PlfTable:
    df = pd.read_csv(path)
    needed = {"age", "rate", "plf"}
    if needed - set(df.columns):
        raise ValueError(f"PLF table needs columns {sorted(needed)}")
    ages = np.sort(df["age"].unique())
    rates = np.sort(df["rate"].unique())
    grid = df.pivot(index="age", columns="rate", values="plf").loc[ages, rates].to_numpy()
    if np.isnan(grid).any():
        raise ValueError("PLF grid has holes")
    return PlfTable(ages=ages.astype(float), rates=rates.astype(float), values=grid)


def default_plf_table_path() -> Path:
    return Path(__file__).parent / "data" / "plf_table.csv"


def plf_lookup(age, rate, table: PlfTable):
    """Bilinear interpolation on the PLF grid, clamped at the edges."""
    age = np.clip(np.asarray(age, dtype=np.float64), table.ages[0], table.ages[-1])
    rate = np.clip(np.asarray(rate, dtype=np.float64), table.rates[0], table.rates[-1])

    ai = np.clip(np.searchsorted(table.ages, age, side="right") - 1, 0, len(table.ages) - 2)
    ri = np.clip(np.searchsorted(table.rates, rate, side="right") - 1, 0, len(table.rates) - 2)

    a0, a1 = table.ages[ai], table.ages[ai + 1]
    r0, r1 = table.rates[ri], table.rates[ri + 1]
    wa = np.where(a1 > a0, (age - a0) / (a1 - a0), 0.0)
    wr = np.where(r1 > r0, (rate - r0) / (r1 - r0), 0.0)

    v00 = table.values[ai, ri]
    v01 = table.values[ai, ri + 1]
    v10 = table.values[ai + 1, ri]
    v11 = table.values[ai + 1, ri + 1]
    out = (
        v00 * (1 - wa) * (1 - wr)
        + v01 * (1 - wa) * wr
        + v10 * wa * (1 - wr)
        + v11 * wa * wr
    )
    return out if out.ndim else float(out)


def rm_origination_cost(home_value, pct: float = RM_ORIGINATION_PCT, flat: float = RM_ORIGINATION_FLAT):
    return pct * np.asarray(home_value, dtype=np.float64) + flat


def originate_reverse_mortgage(
    home: Home,
    age: int,
    bond_rate: float,
    table: PlfTable,
    existing: ReverseMortgage | None = None,
    cost_pct: float = RM_ORIGINATION_PCT,
    cost_flat: float = RM_ORIGINATION_FLAT,
) -> tuple[ReverseMortgage, float]:
    """Originate a lump-sum reverse mortgage at the PLF borrowing limit.

    The balance starts at the gross limit; origination costs come out of the
    lump-sum proceeds.
    """
    if existing is not None:
        raise ValueError("household already has a reverse mortgage")
    if not home.is_primary:
        raise ValueError("reverse mortgage requires the primary residence as collateral")
    limit = plf_lookup(age, bond_rate, table) * home.value
    costs = float(rm_origination_cost(home.value, cost_pct, cost_flat))
    if limit <= costs:
        return ReverseMortgage(balance=0.0, rate=0.0, origination_costs=0.0), 0.0
    rm = ReverseMortgage(balance=limit, rate=bond_rate + REVERSE_MORTGAGE_SPREAD, origination_costs=costs)
    return rm, limit - costs


def sale_pnl(home_value, mortgage_balance=0.0, rm_balance=0.0):
    """Household proceeds from selling at 3% transaction cost.

    The reverse-mortgage repayment is non-recourse: capped at whatever is
    left after the transaction cost and the mortgage. A negative result
    means the mortgage is underwater and the caller chooses default.
    """
    net = (1.0 - TRANSACTION_COST_RATE) * np.asarray(home_value, dtype=np.float64)
    after_mortgage = net - np.asarray(mortgage_balance, dtype=np.float64)
    rm_repay = np.minimum(np.asarray(rm_balance, dtype=np.float64), np.maximum(after_mortgage, 0.0))
    out = after_mortgage - rm_repay
    return out if out.ndim else float(out)


def home_equity(home_value, mortgage_balance=0.0, rm_balance=0.0):
    """Net equity at sale-cost-adjusted valuation, floored at zero by the
    default/non-recourse options."""
    out = np.maximum(0.0, sale_pnl(home_value, mortgage_balance, rm_balance))
    return out if out.ndim else float(out)
