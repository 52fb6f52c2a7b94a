"""Paired life-cycle simulation: homeowner strategy vs consumption-matched
all-equity renter over identical economic paths, incomes, and lifespans.

The engine is vectorized over households: state lives in flat arrays and one
pass over the 75 annual periods simulates both arms of every household in a
chunk. All stocks of value are carried in real 2024 USD -- wealth deflates by
the year's inflation at entry and nominal stock/housing returns apply at year
end, which nets to real growth. Credit contracts are real: fixed rates are
spreads over the deflated bond return at origination, so balances and
payments carry no further inflation adjustment.

Annual order of operations: deflate carried values, forced liquidation on
loan-to-value, purchase decision, flow budget (housing costs, savings rule or
retirement withdrawal, liquidity cascade down to the SSI floor), then year-end
returns and amortization. Death happens at year-end after consumption.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from homecycle import metrics
from homecycle.bootstrap import sample_path
from homecycle.constants import (
    HORIZON,
    MAINTENANCE_RATE,
    MORTGAGE_SPREAD,
    PTI_CAP,
    REVERSE_MORTGAGE_SPREAD,
    RM_LOOKAHEAD_YEARS,
    RM_ORIGINATION_FLAT,
    RM_ORIGINATION_PCT,
    SAVINGS_RATE,
    START_AGE,
    TRANSACTION_COST_RATE,
    WITHDRAWAL_RATE,
    WORKING_YEARS,
    LTV_LIMIT,
    minimum_consumption,
)
from homecycle.housing import PlfTable, annuity_payment, home_equity, plf_lookup, sale_pnl
from homecycle.income import DEFAULT_PROCESS, _draw_shock_raws, _paths_from_raws
from homecycle.mortality import death_age_from_uniforms, last_lived_age
from homecycle.panel import (
    MAT_BOND,
    MAT_HOUSE,
    MAT_HPI,
    MAT_INFL,
    MAT_RENT,
    MAT_STOCK,
    MacroPanel,
)
from homecycle.rng import (
    STREAM_INCOME_HEAD,
    STREAM_INCOME_SPOUSE,
    STREAM_LIFESPAN,
    STREAM_PATH,
    household_stream,
)

MATCH_RTOL = 1e-9          # relative tolerance defining a consumption match
BALANCE_EPS = 0.005        # dollars; a mortgage below this counts as repaid
CONSUME_SHARE = 1.0 - SAVINGS_RATE


@dataclass(frozen=True)
class Strategy:
    """Exogenous purchase rule: buy once financial assets reach
    (down_frac + threshold_frac) of the target home value and the mortgage
    payment fits the payment-to-income cap."""

    down_frac: float
    threshold_frac: float
    allow_second_home: bool = False
    second_down_frac: float = 0.10
    second_threshold_frac: float = 0.10

    @property
    def trigger_frac(self) -> float:
        return self.down_frac + self.threshold_frac

    def label(self) -> str:
        base = f"d{round(self.down_frac * 100)}_t{round(self.threshold_frac * 100)}"
        if self.allow_second_home:
            base += f"_2nd_d{round(self.second_down_frac * 100)}_t{round(self.second_threshold_frac * 100)}"
        return base


@dataclass
class HouseholdInputs:
    """Cell-independent randomness for a chunk of households: market paths,
    incomes, lifespans. Shared by every strategy cell."""

    indices: np.ndarray          # global household indices
    rs: np.ndarray               # (n, T) nominal stock return
    rb: np.ndarray               # (n, T) nominal bond return
    rb_real: np.ndarray          # (n, T) deflated bond return
    rh: np.ndarray               # (n, T) nominal housing return
    rc: np.ndarray               # (n, T) rental yield
    hpi: np.ndarray              # (n, T) price-to-income ratio
    hpi_level: np.ndarray        # (n, T) source country's average ratio
    infl: np.ndarray             # (n, T) inflation
    labor: np.ndarray            # (n, T) household labor income (0 in retirement)
    labor_capacity: np.ndarray   # (n, T) persistent earnings capacity (sizes home purchases)
    ss: np.ndarray               # (n, T) household social security (0 pre-retirement)
    n_alive: np.ndarray          # (n, T) household members alive during year
    cmin: np.ndarray             # (n, T) consumption floor for the alive count
    active: np.ndarray           # (n, T) household exists during year
    end_idx: np.ndarray          # (n,) last lived year index
    alive_at_ret: np.ndarray     # (n,) household exists at retirement
    country_idx: np.ndarray      # (n, T) provenance
    source_years: np.ndarray     # (n, T) provenance

    @property
    def n(self) -> int:
        return len(self.indices)

    @property
    def T(self) -> int:
        return self.rs.shape[1]


def draw_household_inputs(
    panel: MacroPanel,
    master_seed: int,
    indices,
    replacement: float,
    income_target_45: float,
    process=DEFAULT_PROCESS,
    life_table=None,
) -> HouseholdInputs:
    """Draw per-household economic paths, lifespans, and income paths from
    counter-based substreams keyed by (master_seed, household index)."""
    if life_table is None:
        from homecycle.mortality import default_life_table_path, load_life_table

        life_table = load_life_table(default_life_table_path())

    indices = np.asarray(indices, dtype=np.int64)
    n = len(indices)
    T = HORIZON

    rows = np.empty((n, T), dtype=np.int64)
    country_idx = np.empty((n, T), dtype=np.int32)
    source_years = np.empty((n, T), dtype=np.int32)
    for i, h in enumerate(indices):
        g = household_stream(master_seed, int(h), STREAM_PATH)
        p = sample_path(panel, T, g)
        rows[i] = p.row_indices
        country_idx[i] = p.country_idx
        source_years[i] = p.source_years

    mat = panel.matrix[rows]
    rs = mat[..., MAT_STOCK]
    rb = mat[..., MAT_BOND]
    rh = mat[..., MAT_HOUSE]
    rc = mat[..., MAT_RENT]
    hpi = mat[..., MAT_HPI]
    infl = mat[..., MAT_INFL]
    rb_real = (1.0 + rb) / (1.0 + infl) - 1.0

    # purchase sizing uses the source country's average price-to-income
    # ratio: households target a typical local home, not the year's ratio
    country_mean_hpi = np.array([
        panel.matrix[panel.country_offsets[c]:panel.country_offsets[c] + panel.country_lengths[c], MAT_HPI].mean()
        for c in range(panel.n_countries)
    ])
    hpi_level = country_mean_hpi[country_idx]

    # lifespans
    hazard = {s: life_table.hazard_vector(s) for s in ("male", "female")}
    death = np.empty((n, 2), dtype=np.int64)
    for i, h in enumerate(indices):
        g = household_stream(master_seed, int(h), STREAM_LIFESPAN)
        death[i, 0] = death_age_from_uniforms(g.random(T), hazard["male"])
        death[i, 1] = death_age_from_uniforms(g.random(T), hazard["female"])
    last = last_lived_age(death)                          # (n, 2)
    ages = START_AGE + np.arange(T)
    alive_ind = ages[None, None, :] <= last[:, :, None]   # (n, 2, T)
    n_alive = alive_ind.sum(axis=1).astype(np.int8)
    end_idx = (last.max(axis=1) - START_AGE).astype(np.int64)
    active = n_alive > 0

    # incomes
    scale = process.level_scale(income_target_45)
    W = WORKING_YEARS
    ab_raw = np.empty((n, 2, 2))
    z0_raw = np.empty((n, 2))
    nu_u = np.empty((n, 2, W))
    nu_n = np.empty((n, 2, W))
    eps_u = np.empty((n, 2, W))
    eps_n = np.empty((n, 2, W))
    unemp_u = np.empty((n, 2, W))
    for i, h in enumerate(indices):
        for k, sid in enumerate((STREAM_INCOME_HEAD, STREAM_INCOME_SPOUSE)):
            g = household_stream(master_seed, int(h), sid)
            ab_raw[i, k] = g.standard_normal(2)
            z0_raw[i, k] = g.standard_normal()
            nu_u[i, k], nu_n[i, k], eps_u[i, k], eps_n[i, k], unemp_u[i, k] = _draw_shock_raws(g, W)

    alpha = process.sigma_alpha * ab_raw[..., 0]
    rho = process.rho_alpha_beta
    beta = process.sigma_beta * (rho * ab_raw[..., 0] + np.sqrt(max(0.0, 1 - rho * rho)) * ab_raw[..., 1])
    z0 = process.sigma_z0 * z0_raw
    income_ind, z_path, _, _, _, _ = _paths_from_raws(
        alpha, beta, z0, nu_u, nu_n, eps_u, eps_n, unemp_u, scale=scale, process=process
    )

    labor = np.zeros((n, T))
    labor[:, :W] = (income_ind * alive_ind[:, :, :W]).sum(axis=1)

    # persistent earnings capacity: the income level net of transitory and
    # unemployment shocks; used to size home purchases
    t_norm = (np.arange(W) + 1) / 10.0
    cap_ind = scale * np.exp(
        process.g(t_norm) + alpha[..., None] + beta[..., None] * t_norm + z_path
    )
    labor_capacity = np.zeros((n, T))
    labor_capacity[:, :W] = (cap_ind * alive_ind[:, :, :W]).sum(axis=1)

    last_working = income_ind[:, :, W - 1]                # age-64 income per individual
    ss = np.zeros((n, T))
    ss[:, W:] = replacement * (last_working[:, :, None] * alive_ind[:, :, W:]).sum(axis=1)

    cmin = np.where(active, minimum_consumption(np.maximum(n_alive, 1)), 0.0)

    return HouseholdInputs(
        indices=indices,
        rs=rs, rb=rb, rb_real=rb_real, rh=rh, rc=rc, hpi=hpi,
        hpi_level=hpi_level, infl=infl,
        labor=labor, labor_capacity=labor_capacity, ss=ss,
        n_alive=n_alive, cmin=cmin, active=active,
        end_idx=end_idx, alive_at_ret=active[:, WORKING_YEARS].copy(),
        country_idx=country_idx, source_years=source_years,
    )


# ---------------------------------------------------------------------------
# decision rules (broadcastable; shared by the engine and the tests)

def purchase_decision(assets, labor_income, hpi, rb_real, down_frac, threshold_frac, defaulted, capacity=None):
    """Purchase trigger and terms for a target home worth hpi times the
    household's earnings (persistent capacity when given, else current labor
    income).

    Returns (buy mask, home value, payment, rate). A financed purchase needs
    a clean credit record, a priceable mortgage rate, and the payment within
    the PTI cap; a cash purchase skips all three.
    """
    labor_income = np.asarray(labor_income, dtype=np.float64)
    base = labor_income if capacity is None else np.asarray(capacity, dtype=np.float64)
    home_value = np.asarray(hpi, dtype=np.float64) * base
    trigger = (labor_income > 0.0) & (base > 0.0) & (np.asarray(assets) >= (down_frac + threshold_frac) * home_value)
    if down_frac >= 1.0:
        z = np.zeros_like(home_value)
        return trigger, home_value, z, z
    rb_real = np.asarray(rb_real, dtype=np.float64)
    priceable = rb_real > -MORTGAGE_SPREAD
    rate = np.where(priceable, rb_real + MORTGAGE_SPREAD, 0.0)
    payment = np.where(priceable, annuity_payment((1.0 - down_frac) * home_value, rate), np.inf)
    buy = trigger & ~np.asarray(defaulted, dtype=bool) & priceable & (payment <= PTI_CAP * labor_income)
    return buy, home_value, payment, rate


def should_liquidate_ltv(balance, value, owned):
    """Forced liquidation: mortgage balance above LTV_LIMIT of home value."""
    safe = np.where(np.asarray(value) > 0, value, 1.0)
    return np.asarray(owned, dtype=bool) & (np.asarray(balance) / safe > LTV_LIMIT) & (np.asarray(value) > 0)


def should_take_reverse_mortgage(assets, annual_inflow, annual_outlay, floor_consumption):
    """Three-year lookahead at flat income, floor-level consumption, and zero
    asset returns: originate on a strict projected shortfall."""
    net = np.asarray(annual_inflow) - np.asarray(annual_outlay) - np.asarray(floor_consumption)
    return np.asarray(assets) + RM_LOOKAHEAD_YEARS * net < 0.0


def retirement_withdrawal_target(assets, floor_withdrawal, consumption_floor):
    """4% rule: the greater of 4% of current financial wealth and the
    retirement-year floor, never below the minimum consumption level."""
    return np.maximum(np.maximum(WITHDRAWAL_RATE * np.asarray(assets), floor_withdrawal), consumption_floor)


# ---------------------------------------------------------------------------

@dataclass
class CellOutcome:
    """Per-household outcomes of one strategy cell over one chunk."""

    strategy: Strategy
    n: int
    purchased: np.ndarray
    second_purchased: np.ndarray
    purch_year: np.ndarray
    purch_income: np.ndarray
    purch_hpi: np.ndarray
    purch_rate: np.ndarray
    alive_at_ret: np.ndarray
    W_ret_o: np.ndarray
    W_ret_r: np.ndarray
    F_ret_o: np.ndarray
    F_ret_r: np.ndarray
    W_death_o: np.ndarray
    W_death_r: np.ndarray
    F_death_o: np.ndarray
    F_death_r: np.ndarray
    u_pre_o: np.ndarray
    u_pre_r: np.ndarray
    u_post_o: np.ndarray
    u_post_r: np.ndarray
    u_beq_o: np.ndarray
    u_beq_r: np.ndarray
    mdd_life_o: np.ndarray
    mdd_life_r: np.ndarray
    mdd_pre_o: np.ndarray
    mdd_pre_r: np.ndarray
    mdd_post_o: np.ndarray
    mdd_post_r: np.ndarray
    n_sales: np.ndarray
    n_defaults: np.ndarray
    n_rm: np.ndarray
    match_violations: np.ndarray
    matched_years: np.ndarray
    profile: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)


def _mdd_matrix(W: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Vectorized max drawdown of each row of W over columns [lo, hi)."""
    win = W[:, lo:hi]
    if win.shape[1] == 0:
        return np.zeros(W.shape[0])
    peaks = np.maximum.accumulate(win, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dd = np.where(peaks > 0, 1.0 - win / np.where(peaks > 0, peaks, 1.0), 0.0)
    return dd.max(axis=1)


def simulate_cell(
    inp: HouseholdInputs,
    strategy: Strategy,
    plf: PlfTable,
    record_paths: bool = False,
    audit: bool = False,
) -> CellOutcome:
    """Simulate both arms of one strategy cell for a chunk of households."""
    n, T = inp.n, inp.T
    R = WORKING_YEARS

    # owner-arm state
    F = np.zeros(n)
    own1 = np.zeros(n, dtype=bool)
    V1 = np.zeros(n)
    B1 = np.zeros(n)
    P1 = np.zeros(n)
    mrate1 = np.zeros(n)
    own2 = np.zeros(n, dtype=bool)
    V2 = np.zeros(n)
    B2 = np.zeros(n)
    P2 = np.zeros(n)
    mrate2 = np.zeros(n)
    rmb = np.zeros(n)
    rm_rate = np.zeros(n)
    has_rm = np.zeros(n, dtype=bool)
    defaulted = np.zeros(n, dtype=bool)
    dwell = np.zeros(n)
    anchor = np.ones(n, dtype=bool)     # rent base re-anchors to hpi*income until first purchase
    floor_o = np.zeros(n)

    # renter-arm state
    Fr = np.zeros(n)
    floor_r = np.zeros(n)

    purchased = np.zeros(n, dtype=bool)
    second_purchased = np.zeros(n, dtype=bool)
    purch_year = np.full(n, -1, dtype=np.int64)
    purch_income = np.zeros(n)
    purch_hpi = np.zeros(n)
    purch_rate = np.zeros(n)

    n_sales = np.zeros(n, dtype=np.int64)
    n_defaults = np.zeros(n, dtype=np.int64)
    n_rm = np.zeros(n, dtype=np.int64)
    match_violations = np.zeros(n, dtype=np.int64)
    matched_years = np.zeros(n, dtype=np.int64)

    W_ret_o = np.full(n, np.nan)
    W_ret_r = np.full(n, np.nan)
    F_ret_o = np.full(n, np.nan)
    F_ret_r = np.full(n, np.nan)

    C_o = np.ones((n, T))
    C_r = np.ones((n, T))
    W_o = np.zeros((n, T))
    W_r = np.zeros((n, T))
    F_o_path = np.zeros((n, T))
    F_r_path = np.zeros((n, T))
    violation_flag = np.zeros((n, T), dtype=bool)

    audit_rec = (
        {k: np.zeros((n, T)) for k in (
            "F0_o", "proceeds_o", "down_o", "lump_o", "invest_o", "F1_o",
            "income_o", "rent_in", "ssi_o", "outlay_o",
            "F0_r", "invest_r", "F1_r", "rent_r", "ssi_r",
        )}
        if audit
        else None
    )

    def equity_total():
        eq = np.where(own1, home_equity(V1, B1, rmb), 0.0)
        return eq + np.where(own2, home_equity(V2, B2, 0.0), 0.0)

    # liquidation helpers; t is rebound each loop iteration
    t = 0

    def liquidate_second(mask):
        """Sell or default the vacant second home; proceeds to F."""
        nonlocal F
        if not mask.any():
            return
        pnl = sale_pnl(V2, B2, 0.0)
        sell = mask & (pnl > 0)
        dflt = mask & ~(pnl > 0)
        F = F + np.where(sell, pnl, 0.0)
        if audit_rec is not None:
            audit_rec["proceeds_o"][:, t] += np.where(sell, pnl, 0.0)
        defaulted[dflt] = True
        n_sales[sell] += 1
        n_defaults[dflt] += 1
        own2[mask] = False
        V2[mask] = 0.0
        B2[mask] = 0.0
        P2[mask] = 0.0
        mrate2[mask] = 0.0

    def liquidate_primary(mask):
        """Sell or default the primary home; a surviving second home is
        promoted to primary (the household moves in, its rent income stops)."""
        nonlocal F
        if not mask.any():
            return
        pnl = sale_pnl(V1, B1, rmb)
        sell = mask & (pnl > 0)
        dflt = mask & ~(pnl > 0)
        F = F + np.where(sell, pnl, 0.0)
        if audit_rec is not None:
            audit_rec["proceeds_o"][:, t] += np.where(sell, pnl, 0.0)
        defaulted[dflt] = True
        n_sales[sell] += 1
        n_defaults[dflt] += 1
        own1[mask] = False
        V1[mask] = 0.0
        B1[mask] = 0.0
        P1[mask] = 0.0
        mrate1[mask] = 0.0
        rmb[mask] = 0.0
        rm_rate[mask] = 0.0
        has_rm[mask] = False
        promote = mask & own2
        if promote.any():
            own1[promote] = True
            V1[promote] = V2[promote]
            B1[promote] = B2[promote]
            P1[promote] = P2[promote]
            mrate1[promote] = mrate2[promote]
            dwell[promote] = V2[promote]
            own2[promote] = False
            V2[promote] = 0.0
            B2[promote] = 0.0
            P2[promote] = 0.0
            mrate2[promote] = 0.0

    for t in range(T):
        active = inp.active[:, t]
        if not active.any():
            if t:
                for arr in (W_o, W_r, C_o, C_r, F_o_path, F_r_path):
                    arr[:, t] = arr[:, t - 1]
            continue
        infl = inp.infl[:, t]
        rs_t = inp.rs[:, t]
        rh_t = inp.rh[:, t]
        rc_t = inp.rc[:, t]
        hpi_t = inp.hpi[:, t]
        rb_t = inp.rb_real[:, t]     # credit contracts price off the deflated bond return
        cmin_t = inp.cmin[:, t]
        working = t < R

        # 1. deflate carried values by this year's inflation (credit
        # contracts are real: priced off the deflated bond return)
        one_pi = 1.0 + infl
        F = F / one_pi
        Fr = Fr / one_pi
        V1 = V1 / one_pi
        V2 = V2 / one_pi
        dwell = dwell / one_pi
        if audit_rec is not None:
            audit_rec["F0_o"][:, t] = F
            audit_rec["F0_r"][:, t] = Fr

        # 2. retirement snapshot: wealth and withdrawal floors at age 65
        # (floors are on financial wealth; housing is tapped through the
        # reverse-mortgage / sale cascade when the floor binds)
        if t == R:
            W_ret_o = np.where(active, F + equity_total(), np.nan)
            F_ret_o = np.where(active, F, np.nan)
            W_ret_r = np.where(active, Fr, np.nan)
            F_ret_r = np.where(active, Fr, np.nan)
            floor_o = WITHDRAWAL_RATE * F
            floor_r = WITHDRAWAL_RATE * Fr

        # 3. forced liquidation on loan-to-value (second home first)
        liquidate_second(active & should_liquidate_ltv(B2, V2, own2))
        liquidate_primary(active & should_liquidate_ltv(B1, V1, own1))

        # 4. income and the rent base
        Y = inp.labor[:, t] if working else inp.ss[:, t]
        if working:
            cap_anchor = inp.labor_capacity[:, t]
            hpi_lvl_t = inp.hpi_level[:, t]
            re_anchor = active & anchor & ~own1 & (cap_anchor > 0)
            dwell = np.where(re_anchor, hpi_lvl_t * cap_anchor, dwell)

        # 5. purchase decisions (working life only)
        fee = np.zeros(n)
        if working:
            cap_t = inp.labor_capacity[:, t]
            buy, hstar, pay_new, rate_new = purchase_decision(
                F, Y, hpi_lvl_t, rb_t,
                strategy.down_frac, strategy.threshold_frac, defaulted,
                capacity=cap_t,
            )
            buy = buy & active & ~own1 & ~own2
            if buy.any():
                down_amt = np.where(buy, strategy.down_frac * hstar, 0.0)
                F = F - down_amt
                if audit_rec is not None:
                    audit_rec["down_o"][:, t] += down_amt
                V1 = np.where(buy, hstar, V1)
                B1 = np.where(buy, (1.0 - strategy.down_frac) * hstar, B1)
                P1 = np.where(buy, pay_new, P1)
                mrate1 = np.where(buy, rate_new, mrate1)
                own1 = own1 | buy
                dwell = np.where(buy, hstar, dwell)
                anchor = anchor & ~buy
                fee = fee + np.where(buy, TRANSACTION_COST_RATE * hstar, 0.0)
                first = buy & ~purchased
                purchased = purchased | buy
                purch_year[first] = t
                purch_income[first] = Y[first]
                purch_hpi[first] = hpi_t[first]
                purch_rate[first] = rb_t[first]
            if strategy.allow_second_home:
                buy2, h2star, pay2_new, rate2_new = purchase_decision(
                    F, Y, hpi_lvl_t, rb_t,
                    strategy.second_down_frac, strategy.second_threshold_frac, defaulted,
                    capacity=cap_t,
                )
                buy2 = buy2 & active & own1 & (B1 <= BALANCE_EPS) & ~own2 & ~buy
                if buy2.any():
                    down2 = np.where(buy2, strategy.second_down_frac * h2star, 0.0)
                    F = F - down2
                    if audit_rec is not None:
                        audit_rec["down_o"][:, t] += down2
                    V2 = np.where(buy2, h2star, V2)
                    B2 = np.where(buy2, (1.0 - strategy.second_down_frac) * h2star, B2)
                    P2 = np.where(buy2, pay2_new, P2)
                    mrate2 = np.where(buy2, rate2_new, mrate2)
                    own2 = own2 | buy2
                    fee = fee + np.where(buy2, TRANSACTION_COST_RATE * h2star, 0.0)
                    second_purchased = second_purchased | buy2

        # 6. owner-arm flow budget
        def flow_terms():
            pay1 = np.where(own1 & (B1 > 0), np.minimum(P1, B1 * (1.0 + mrate1)), 0.0)
            pay2 = np.where(own2 & (B2 > 0), np.minimum(P2, B2 * (1.0 + mrate2)), 0.0)
            maint = MAINTENANCE_RATE * (np.where(own1, V1, 0.0) + np.where(own2, V2, 0.0))
            rent_c = np.where(~own1, rc_t * dwell, 0.0)
            rent_in = np.where(own2, rc_t * V2, 0.0)
            return pay1, pay2, maint, rent_c, rent_in

        if working:
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c + fee
            disp = Y + rent_in - outlay
            # liquidity cascade down to the consumption floor
            short = active & (F + disp < cmin_t)
            liquidate_second(short & own2)
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c + fee
            disp = Y + rent_in - outlay
            short = active & (F + disp < cmin_t)
            liquidate_primary(short & own1)
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c + fee
            disp = Y + rent_in - outlay
            short = active & (F + disp < cmin_t)        # all renters now
            ssi_o = np.where(short, cmin_t - (F + disp), 0.0)
            cons = np.where(
                ssi_o > 0, cmin_t, np.maximum(CONSUME_SHARE * np.maximum(disp, 0.0), cmin_t)
            )
            invest_o = disp + ssi_o - cons
        else:
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c
            inflow = Y + rent_in
            c_target = retirement_withdrawal_target(F, floor_o, cmin_t)
            # reverse mortgage: fires when the withdrawal floor binds (current
            # 4% below the retirement-year 4%), on a projected three-year
            # shortfall, or on a current-year shortfall
            proj_c = np.maximum(floor_o, cmin_t)
            want_rm = active & own1 & ~has_rm & (
                (WITHDRAWAL_RATE * F < floor_o)
                | should_take_reverse_mortgage(F, inflow, outlay, proj_c)
                | (F + inflow - outlay - c_target < 0)
            )
            if want_rm.any():
                age = START_AGE + t
                limit = plf_lookup(np.full(n, float(age)), rb_t, plf) * V1
                lump = limit - (RM_ORIGINATION_PCT * V1 + RM_ORIGINATION_FLAT)
                take = want_rm & (lump > 0)
                F = F + np.where(take, lump, 0.0)
                if audit_rec is not None:
                    audit_rec["lump_o"][:, t] += np.where(take, lump, 0.0)
                rmb = np.where(take, limit, rmb)
                rm_rate = np.where(take, rb_t + REVERSE_MORTGAGE_SPREAD, rm_rate)
                has_rm = has_rm | take
                n_rm[take] += 1
            # liquidity cascade: the vacant second home goes first when the
            # withdrawal target is unaffordable; the residence is sold only in
            # true distress (resources below the minimum consumption level),
            # and consumption degrades gracefully toward that floor meanwhile.
            short = active & (F + inflow - outlay - c_target < 0)
            liquidate_second(short & own2)
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c
            inflow = Y + rent_in
            distress = active & (F + inflow - outlay < cmin_t)
            liquidate_primary(distress & own1)
            pay1, pay2, maint, rent_c, rent_in = flow_terms()
            outlay = pay1 + pay2 + maint + rent_c
            inflow = Y + rent_in
            resources = F + inflow - outlay
            cons = np.clip(c_target, cmin_t, np.maximum(resources, cmin_t))
            ssi_o = np.maximum(cmin_t - resources, 0.0) * active
            disp = inflow - outlay
            invest_o = disp + ssi_o - cons

        F = F + np.where(active, invest_o, 0.0)
        F = np.maximum(F, 0.0)      # guard float dust; cascade guarantees >= 0
        if audit_rec is not None:
            audit_rec["income_o"][:, t] = Y
            audit_rec["rent_in"][:, t] = rent_in
            audit_rec["ssi_o"][:, t] = ssi_o
            audit_rec["outlay_o"][:, t] = outlay
            audit_rec["invest_o"][:, t] = np.where(active, invest_o, 0.0)
            audit_rec["F1_o"][:, t] = F

        # 7. renter-arm flow budget
        rent_r = rc_t * dwell
        if working:
            matched = purchased & active
            disp_r = Y - rent_r
            resources_r = Fr + disp_r
            # generic rule (identical to the owner arm pre-purchase)
            short_g = active & (resources_r < cmin_t)
            ssi_g = np.where(short_g, cmin_t - resources_r, 0.0)
            cons_g = np.where(
                ssi_g > 0, cmin_t, np.maximum(CONSUME_SHARE * np.maximum(disp_r, 0.0), cmin_t)
            )
            # matched rule: replicate the owner's flow investment
            invest_m_raw = (outlay - rent_in) + invest_o - rent_r
            cons_m_raw = Y - rent_r - invest_m_raw
            cons_m = np.clip(cons_m_raw, cmin_t, np.maximum(resources_r, cmin_t))
            ssi_m = np.where(resources_r < cmin_t, cmin_t - resources_r, 0.0)
            cons_r = np.where(matched, cons_m, cons_g)
            ssi_r = np.where(matched, ssi_m, ssi_g)
            invest_r = disp_r + ssi_r - cons_r
            matched_years += matched.astype(np.int64)
        else:
            c_target_r = retirement_withdrawal_target(Fr, floor_r, cmin_t)
            resources_r = Fr + Y - rent_r
            short_r = active & (resources_r < c_target_r)
            cons_r = np.where(
                short_r, np.clip(c_target_r, cmin_t, np.maximum(resources_r, cmin_t)), c_target_r
            )
            ssi_r = np.where(short_r, np.maximum(cmin_t - resources_r, 0.0), 0.0)
            invest_r = Y - rent_r + ssi_r - cons_r

        Fr = Fr + np.where(active, invest_r, 0.0)
        Fr = np.maximum(Fr, 0.0)
        if audit_rec is not None:
            audit_rec["rent_r"][:, t] = rent_r
            audit_rec["ssi_r"][:, t] = ssi_r
            audit_rec["invest_r"][:, t] = np.where(active, invest_r, 0.0)
            audit_rec["F1_r"][:, t] = Fr

        if working:
            dev = np.abs(cons_r - cons) > MATCH_RTOL * np.maximum(np.abs(cons), 1.0)
            bad = matched & dev
            violation_flag[:, t] = bad
            match_violations += bad.astype(np.int64)

        # 8. year-end: amortization, market returns, terminal wealth
        B1 = np.where(own1 & (B1 > 0), B1 * (1.0 + mrate1) - pay1, B1)
        B2 = np.where(own2 & (B2 > 0), B2 * (1.0 + mrate2) - pay2, B2)
        B1 = np.maximum(B1, 0.0)
        B2 = np.maximum(B2, 0.0)
        F = F * (1.0 + rs_t)
        Fr = Fr * (1.0 + rs_t)
        V1 = V1 * (1.0 + rh_t)
        V2 = V2 * (1.0 + rh_t)
        dwell = dwell * (1.0 + rh_t)
        rmb = rmb * np.where(has_rm, 1.0 + rm_rate, 1.0)

        W_now_o = F + equity_total()
        C_o[:, t] = np.where(active, cons, 1.0)
        C_r[:, t] = np.where(active, cons_r, 1.0)
        if t:
            W_o[:, t] = np.where(active, W_now_o, W_o[:, t - 1])
            W_r[:, t] = np.where(active, Fr, W_r[:, t - 1])
            F_o_path[:, t] = np.where(active, F, F_o_path[:, t - 1])
            F_r_path[:, t] = np.where(active, Fr, F_r_path[:, t - 1])
        else:
            W_o[:, t] = W_now_o
            W_r[:, t] = Fr
            F_o_path[:, t] = F
            F_r_path[:, t] = Fr

    # ---- outcomes
    W_death_o = W_o[:, T - 1].copy()
    W_death_r = W_r[:, T - 1].copy()
    F_death_o = F_o_path[:, T - 1].copy()
    F_death_r = F_r_path[:, T - 1].copy()

    alive = inp.active
    n_safe = np.maximum(inp.n_alive, 1)
    term_o = np.where(alive, metrics.crra_term(np.maximum(C_o, 1e-12), n_safe), 0.0)
    term_r = np.where(alive, metrics.crra_term(np.maximum(C_r, 1e-12), n_safe), 0.0)
    u_pre_o = term_o[:, :R].sum(axis=1)
    u_pre_r = term_r[:, :R].sum(axis=1)
    u_post_o = term_o[:, R:].sum(axis=1)
    u_post_r = term_r[:, R:].sum(axis=1)
    u_beq_o = metrics.bequest_term(W_death_o)
    u_beq_r = metrics.bequest_term(W_death_r)

    mdd_life_o = _mdd_matrix(W_o, 0, T)
    mdd_life_r = _mdd_matrix(W_r, 0, T)
    mdd_pre_o = _mdd_matrix(W_o, 0, R)
    mdd_pre_r = _mdd_matrix(W_r, 0, R)
    mdd_post_o = _mdd_matrix(W_o, R, T)
    mdd_post_r = _mdd_matrix(W_r, R, T)

    prof_mask = purchased[:, None] & alive
    profile = {
        "count": prof_mask.sum(axis=0),
        "W_o": (W_o * prof_mask).sum(axis=0),
        "W_r": (W_r * prof_mask).sum(axis=0),
        "F_o": (F_o_path * prof_mask).sum(axis=0),
        "F_r": (F_r_path * prof_mask).sum(axis=0),
        "C_o": (C_o * prof_mask).sum(axis=0),
        "C_r": (C_r * prof_mask).sum(axis=0),
    }

    paths = {}
    if record_paths:
        paths = {
            "C_o": C_o, "C_r": C_r, "W_o": W_o, "W_r": W_r,
            "F_o": F_o_path, "F_r": F_r_path, "violation": violation_flag,
        }
        if audit_rec is not None:
            paths["audit"] = audit_rec

    return CellOutcome(
        strategy=strategy, n=n,
        purchased=purchased, second_purchased=second_purchased,
        purch_year=purch_year, purch_income=purch_income,
        purch_hpi=purch_hpi, purch_rate=purch_rate,
        alive_at_ret=inp.alive_at_ret,
        W_ret_o=W_ret_o, W_ret_r=W_ret_r, F_ret_o=F_ret_o, F_ret_r=F_ret_r,
        W_death_o=W_death_o, W_death_r=W_death_r,
        F_death_o=F_death_o, F_death_r=F_death_r,
        u_pre_o=u_pre_o, u_pre_r=u_pre_r,
        u_post_o=u_post_o, u_post_r=u_post_r,
        u_beq_o=u_beq_o, u_beq_r=u_beq_r,
        mdd_life_o=mdd_life_o, mdd_life_r=mdd_life_r,
        mdd_pre_o=mdd_pre_o, mdd_pre_r=mdd_pre_r,
        mdd_post_o=mdd_post_o, mdd_post_r=mdd_post_r,
        n_sales=n_sales, n_defaults=n_defaults, n_rm=n_rm,
        match_violations=match_violations, matched_years=matched_years,
        profile=profile, paths=paths,
    )


def simulate_pair(inp: HouseholdInputs, strategy: Strategy, plf: PlfTable) -> CellOutcome:
    """Single-household convenience wrapper with full per-year records."""
    return simulate_cell(inp, strategy, plf, record_paths=True, audit=True)
