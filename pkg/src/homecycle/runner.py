"""Strategy-grid orchestration: parallel household simulation, fixed-order
aggregation, and result-table emission.

Households are processed in fixed-size chunks whose boundaries do not depend
on the worker count, and per-chunk partial sums are reduced in chunk order,
so any thread count reproduces byte-identical outputs.
"""

from __future__ import annotations

import datetime
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from homecycle import __version__, metrics
from homecycle.config import RunConfig
from homecycle.constants import HORIZON
from homecycle.engine import (
    CellOutcome,
    Strategy,
    draw_household_inputs,
    simulate_cell,
)
from homecycle.housing import default_plf_table_path, load_plf_table
from homecycle.mortality import default_life_table_path, load_life_table
from homecycle.panel import MacroPanel, default_panel_path, load_panel, rescale_hpi
from homecycle.rng import STREAM_PATH, household_stream

CHUNK = 8192          # fixed chunk size; independent of thread count


@dataclass
class CellAgg:
    """Order-stable partial sums for one strategy cell."""

    n_total: int = 0
    n_purchased: int = 0
    n_purch_ret: int = 0            # purchased and alive at retirement
    n_second: int = 0
    sums: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    gini_o: list = field(default_factory=list)
    gini_r: list = field(default_factory=list)
    profile: dict = field(default_factory=dict)
    detail: dict | None = None      # per-household arrays (base cell only)

    def merge(self, other: "CellAgg") -> None:
        self.n_total += other.n_total
        self.n_purchased += other.n_purchased
        self.n_purch_ret += other.n_purch_ret
        self.n_second += other.n_second
        for k, v in other.sums.items():
            self.sums[k] = self.sums.get(k, 0.0) + v
        for k, v in other.counts.items():
            self.counts[k] = self.counts.get(k, 0) + v
        self.gini_o.extend(other.gini_o)
        self.gini_r.extend(other.gini_r)
        for k, v in other.profile.items():
            self.profile[k] = self.profile.get(k, 0) + v
        if other.detail is not None:
            if self.detail is None:
                self.detail = {k: [] for k in other.detail}
            for k, v in other.detail.items():
                self.detail[k].extend(v)


def _utility_window_fields(out: CellOutcome) -> dict:
    """Per-household utility sums by window. Cell-level welfare is the
    equivalent wealth of the cross-household MEAN utility, so these are
    summed (not converted per household) during aggregation."""
    return {
        "U_pre_o": out.u_pre_o, "U_pre_r": out.u_pre_r,
        "U_post_o": out.u_post_o + out.u_beq_o, "U_post_r": out.u_post_r + out.u_beq_r,
        "U_life_o": out.u_pre_o + out.u_post_o + out.u_beq_o,
        "U_life_r": out.u_pre_r + out.u_post_r + out.u_beq_r,
        "U_cons_post_o": out.u_post_o, "U_cons_post_r": out.u_post_r,
        "U_cons_life_o": out.u_pre_o + out.u_post_o, "U_cons_life_r": out.u_pre_r + out.u_post_r,
        "U_beq_o": out.u_beq_o, "U_beq_r": out.u_beq_r,
    }


def aggregate_cell(out: CellOutcome, keep_detail: bool = False) -> CellAgg:
    """Reduce one chunk's outcomes to partial sums (owner stats conditioned
    on purchase; the renter side uses the same household set). Second-home
    cells condition on the second purchase instead."""
    p = out.second_purchased if out.strategy.allow_second_home else out.purchased
    pr = p & out.alive_at_ret
    agg = CellAgg(
        n_total=out.n,
        n_purchased=int(p.sum()),
        n_purch_ret=int(pr.sum()),
        n_second=int(out.second_purchased.sum()),
    )
    v = _utility_window_fields(out)
    s = agg.sums
    for name, arr, mask in (
        ("W_ret_o", out.W_ret_o, pr), ("W_ret_r", out.W_ret_r, pr),
        ("F_ret_o", out.F_ret_o, pr), ("F_ret_r", out.F_ret_r, pr),
        ("W_death_o", out.W_death_o, p), ("W_death_r", out.W_death_r, p),
        ("F_death_o", out.F_death_o, p), ("F_death_r", out.F_death_r, p),
        ("mdd_life_o", out.mdd_life_o, p), ("mdd_life_r", out.mdd_life_r, p),
        ("mdd_pre_o", out.mdd_pre_o, p), ("mdd_pre_r", out.mdd_pre_r, p),
        ("mdd_post_o", out.mdd_post_o, pr), ("mdd_post_r", out.mdd_post_r, pr),
    ):
        s[name] = float(arr[mask].sum())
    for name, arr in v.items():
        # consumption-only post-retirement utility exists only for households
        # that reach retirement
        mask = pr if name.startswith("U_cons_post") else p
        s[name] = float(arr[mask].sum())
    agg.counts = {
        "sales": int(out.n_sales.sum()),
        "defaults": int(out.n_defaults.sum()),
        "rm_originations": int(out.n_rm.sum()),
        "match_violations": int(out.match_violations.sum()),
        "matched_years": int(out.matched_years.sum()),
    }
    agg.gini_o.append(out.W_ret_o[pr])
    agg.gini_r.append(out.W_ret_r[pr])
    agg.profile = dict(out.profile)
    if keep_detail:
        agg.detail = {
            "purchased": [p], "second_purchased": [out.second_purchased],
            "alive_at_ret": [out.alive_at_ret],
            "purch_income": [out.purch_income], "purch_hpi": [out.purch_hpi],
            "purch_rate": [out.purch_rate], "purch_year": [out.purch_year],
            "W_ret_o": [out.W_ret_o], "W_ret_r": [out.W_ret_r],
            "W_death_o": [out.W_death_o], "W_death_r": [out.W_death_r],
            "F_ret_o": [out.F_ret_o], "F_death_o": [out.F_death_o],
            "U_post_o": [v["U_post_o"]], "U_post_r": [v["U_post_r"]],
            "U_life_o": [v["U_life_o"]], "U_life_r": [v["U_life_r"]],
            "U_pre_o": [v["U_pre_o"]], "U_cons_life_o": [v["U_cons_life_o"]],
            "U_beq_o": [v["U_beq_o"]],
        }
    return agg


def build_strategies(cfg: RunConfig) -> list[Strategy]:
    """Grid cells in emission order; second-home cells fix the first home at
    the base 10/10 rule."""
    cells = [
        Strategy(down_frac=d, threshold_frac=t)
        for t in cfg.threshold_fracs
        for d in cfg.down_fracs
    ]
    if cfg.second_home:
        for t in cfg.second_threshold_fracs:
            for d in cfg.second_down_fracs:
                cells.append(Strategy(
                    down_frac=0.1, threshold_frac=0.1, allow_second_home=True,
                    second_down_frac=d, second_threshold_frac=t,
                ))
    return cells


BASE_CELL = Strategy(down_frac=0.1, threshold_frac=0.1)

# worker context inherited through fork
_CTX: dict = {}


def _init_ctx(panel, strategies, cfg, plf, life_table, base_label):
    _CTX.clear()
    _CTX.update(
        panel=panel, strategies=strategies, cfg=cfg, plf=plf,
        life_table=life_table, base_label=base_label,
    )


def _run_chunk(args):
    chunk_idx, lo, hi = args
    panel = _CTX["panel"]
    cfg: RunConfig = _CTX["cfg"]
    strategies = _CTX["strategies"]
    inputs = draw_household_inputs(
        panel, cfg.seed, np.arange(lo, hi), cfg.replacement,
        cfg.income_target_45, life_table=_CTX["life_table"],
    )
    out = {}
    for strat in strategies:
        try:
            cell = simulate_cell(inputs, strat, _CTX["plf"])
        except Exception as exc:
            raise RuntimeError(
                f"cell {strat.label()}, households {lo}..{hi - 1}: {exc}"
            ) from exc
        # the base cell keeps per-household detail for heterogeneity brackets;
        # second-home cells keep it for same-household comparisons
        keep = strat.label() == _CTX["base_label"] or strat.allow_second_home
        out[strat.label()] = aggregate_cell(cell, keep_detail=keep)
    return chunk_idx, out


@dataclass
class ResultSet:
    cfg: RunConfig
    strategies: list
    cells: dict                 # label -> CellAgg
    panel_fingerprint: str
    panel_report: str
    timestamp: str


def load_run_panel(cfg: RunConfig) -> MacroPanel:
    path = Path(cfg.data_dir) if cfg.data_dir else default_panel_path()
    panel = load_panel(path, country_filter=cfg.countries)
    return rescale_hpi(panel)


def run_grid(cfg: RunConfig, panel: MacroPanel | None = None) -> ResultSet:
    if panel is None:
        panel = load_run_panel(cfg)
    plf = load_plf_table(default_plf_table_path())
    life_table = load_life_table(default_life_table_path())
    strategies = build_strategies(cfg)
    base_label = BASE_CELL.label() if BASE_CELL.label() in {s.label() for s in strategies} else strategies[0].label()

    n = cfg.households
    chunks = [(ci, lo, min(lo + CHUNK, n)) for ci, lo in enumerate(range(0, n, CHUNK))]
    _init_ctx(panel, strategies, cfg, plf, life_table, base_label)

    results: dict[int, dict] = {}
    if cfg.threads == 1 or len(chunks) == 1:
        for job in chunks:
            ci, out = _run_chunk(job)
            results[ci] = out
    else:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            for ci, out in pool.map(_run_chunk, chunks, chunksize=1):
                results[ci] = out

    cells: dict[str, CellAgg] = {}
    for ci in sorted(results):
        for label, agg in results[ci].items():
            if label not in cells:
                cells[label] = agg
            else:
                cells[label].merge(agg)

    return ResultSet(
        cfg=cfg, strategies=strategies, cells=cells,
        panel_fingerprint=panel.fingerprint, panel_report=panel.report,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )


# ---------------------------------------------------------------------------
# pure-portfolio comparison (all-equity vs 50/50 stock-bond vs 50/50 stock-house)

COMPARISON_STRATEGIES = ("all_equity", "stock_bond", "stock_house")


def run_strategy_comparison(cfg: RunConfig, panel: MacroPanel | None = None) -> dict:
    """75-year rebalanced accumulation from wealth 1 on bootstrapped paths;
    returns per-year mean and std of log wealth for the three strategies."""
    if panel is None:
        panel = load_run_panel(cfg)
    T = HORIZON
    n = cfg.comparison_paths
    sums = {s: np.zeros(T) for s in COMPARISON_STRATEGIES}
    sq = {s: np.zeros(T) for s in COMPARISON_STRATEGIES}

    from homecycle.bootstrap import sample_path
    from homecycle.panel import MAT_BOND, MAT_HOUSE, MAT_INFL, MAT_STOCK

    for lo in range(0, n, CHUNK):
        hi = min(lo + CHUNK, n)
        m = hi - lo
        rows = np.empty((m, T), dtype=np.int64)
        for i, h in enumerate(range(lo, hi)):
            g = household_stream(cfg.seed, h, STREAM_PATH)
            rows[i] = sample_path(panel, T, g).row_indices
        mat = panel.matrix[rows]
        rs, rb, rh, infl = (mat[..., j] for j in (MAT_STOCK, MAT_BOND, MAT_HOUSE, MAT_INFL))
        legs = {
            "all_equity": rs,
            "stock_bond": 0.5 * rs + 0.5 * rb,
            "stock_house": 0.5 * rs + 0.5 * rh,
        }
        for name, rp in legs.items():
            w = np.cumprod((1.0 + rp) / (1.0 + infl), axis=1)
            lw = np.log(w)
            sums[name] += lw.sum(axis=0)
            sq[name] += (lw * lw).sum(axis=0)

    out = {}
    for name in COMPARISON_STRATEGIES:
        mean = sums[name] / n
        var = np.maximum(sq[name] / n - mean**2, 0.0)
        out[name] = {"mean_log_wealth": mean, "std_log_wealth": np.sqrt(var)}
    return out


# ---------------------------------------------------------------------------
# table emission

def _meta_lines(rs: ResultSet) -> list[str]:
    cfg = rs.cfg
    return [
        f"# homecycle {__version__}",
        f"# timestamp: {rs.timestamp}",
        f"# seed: {cfg.seed}",
        f"# config_hash: {cfg.config_hash()}",
        f"# panel_fingerprint: {rs.panel_fingerprint}",
        f"# countries: {cfg.countries or 'all'}",
        f"# n_households: {cfg.households}",
        f"# replacement_lambda: {cfg.replacement}",
        f"# income_target_45: {cfg.income_target_45}",
    ]


def _write_csv(path: Path, rs: ResultSet, header: str, rows: list[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(_meta_lines(rs)) + "\n")
        fh.write(header + "\n")
        fh.writelines(r + "\n" for r in rows)


def _mean(agg: CellAgg, key: str, denom: str = "purchased") -> float:
    n = {"purchased": agg.n_purchased, "ret": agg.n_purch_ret}[denom]
    return agg.sums[key] / n if n else float("nan")


def _welfare_change(agg: CellAgg, key: str, denom: str = "purchased") -> float:
    """Welfare change between arms: equivalent wealth of the mean utility,
    owner over renter. The mean-utility aggregate is dominated by the
    worst-off households, so this measures downside insurance."""
    v_o = metrics.equivalent_wealth(_mean(agg, f"{key}_o", denom))
    v_r = metrics.equivalent_wealth(_mean(agg, f"{key}_r", denom))
    return v_o / v_r - 1.0


def cell_stats(agg: CellAgg) -> dict:
    """Headline statistics of one cell, in percent where applicable."""
    pc = lambda x: 100.0 * x
    stats = {
        "n_purchased": agg.n_purchased,
        "n_purch_ret": agg.n_purch_ret,
        "wealth_change_death": pc(_mean(agg, "W_death_o") / _mean(agg, "W_death_r") - 1.0),
        "wealth_change_ret": pc(_mean(agg, "W_ret_o", "ret") / _mean(agg, "W_ret_r", "ret") - 1.0),
        "fin_change_ret": pc(_mean(agg, "F_ret_o", "ret") / _mean(agg, "F_ret_r", "ret") - 1.0),
        "fin_change_death": pc(_mean(agg, "F_death_o") / _mean(agg, "F_death_r") - 1.0),
        "welfare_change_death": pc(_welfare_change(agg, "U_post")),
        "welfare_change_life": pc(_welfare_change(agg, "U_life")),
        "welfare_change_pre": pc(_welfare_change(agg, "U_pre")),
        "welfare_cons_change": pc(_welfare_change(agg, "U_cons_post", "ret")),
        "welfare_beq_change": pc(_welfare_change(agg, "U_beq")),
        "mdd_change_life": pc(_mean(agg, "mdd_life_r") - _mean(agg, "mdd_life_o")),
        "mdd_change_pre": pc(_mean(agg, "mdd_pre_r") - _mean(agg, "mdd_pre_o")),
        "mdd_change_post": pc(_mean(agg, "mdd_post_r", "ret") - _mean(agg, "mdd_post_o", "ret")),
        "mean_W_death_o": _mean(agg, "W_death_o"),
        "mean_W_ret_o": _mean(agg, "W_ret_o", "ret"),
        "mean_F_death_o": _mean(agg, "F_death_o"),
        "welfare_level_post_o": metrics.equivalent_wealth(_mean(agg, "U_post_o")),
        "welfare_level_life_o": metrics.equivalent_wealth(_mean(agg, "U_life_o")),
    }
    if agg.n_purch_ret:
        w_o = np.concatenate(agg.gini_o)
        w_r = np.concatenate(agg.gini_r)
        g_o = metrics.gini(w_o)
        g_r = metrics.gini(w_r)
        stats["gini_o"] = g_o
        stats["gini_r"] = g_r
        stats["gini_change"] = pc(g_o / g_r - 1.0)
    else:
        stats["gini_o"] = stats["gini_r"] = stats["gini_change"] = float("nan")
    return stats


def _single_cells(rs: ResultSet) -> list[Strategy]:
    return [s for s in rs.strategies if not s.allow_second_home]


def _second_cells(rs: ResultSet) -> list[Strategy]:
    return [s for s in rs.strategies if s.allow_second_home]


def _bracket_change_rows(detail: dict, key_name: str, key: np.ndarray, mask: np.ndarray) -> list[str]:
    """Heterogeneity rows: per-bracket owner-vs-renter changes (ratio of
    bracket means; welfare via equivalent wealth of the bracket-mean
    utility), plus the best 5%-wide percentile bin per outcome."""
    edges = (0, 10, 20, 30, 40, 50, 90, 100)
    ident = lambda x: x
    outcomes = {
        "wealth_ret": ("W_ret_o", "W_ret_r", detail["alive_at_ret"] & mask, ident),
        "wealth_death": ("W_death_o", "W_death_r", mask, ident),
        "welfare_post": ("U_post_o", "U_post_r", mask, metrics.equivalent_wealth),
        "welfare_life": ("U_life_o", "U_life_r", mask, metrics.equivalent_wealth),
    }
    rows = []
    k = key[mask]
    labels = metrics.bracket_edges_to_labels(list(edges))
    cuts = np.percentile(k, edges)
    fine = np.arange(0, 101, 5)
    fine_cuts = np.percentile(k, fine)

    def bin_masks(cuts_arr):
        ms = []
        for j in range(len(cuts_arr) - 1):
            lo, hi = cuts_arr[j], cuts_arr[j + 1]
            m = (k >= lo) & ((k < hi) if j < len(cuts_arr) - 2 else (k <= hi))
            ms.append(m)
        return ms

    coarse = bin_masks(cuts)
    fine_m = bin_masks(fine_cuts)
    for name, (num, den, cond, xform) in outcomes.items():
        num_v = detail[num][mask]
        den_v = detail[den][mask]
        cond_v = cond[mask] if cond is not mask else np.ones(len(k), bool)

        def change(mm):
            # tiny brackets can be degenerate at desk scale; report NaN there
            with np.errstate(invalid="ignore", divide="ignore"):
                return xform(num_v[mm].mean()) / xform(den_v[mm].mean()) - 1.0

        vals = [100.0 * change(m & cond_v) if (m & cond_v).any() else None for m in coarse]
        best_label, best_val = "", -np.inf
        for j, m in enumerate(fine_m):
            mm = m & cond_v
            if mm.any() and (v := change(mm)) > best_val:
                best_val, best_label = v, f"{(fine[j] + fine[j + 1]) // 2}%"
        for lbl, v in zip(labels, vals):
            rows.append(f"{key_name},{name},{lbl},{'' if v is None else format(v, '.4f')}")
        rows.append(f"{key_name},{name},best_percentile,{best_label}")
    return rows


def write_tables(rs: ResultSet, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    singles = _single_cells(rs)
    stats = {s.label(): cell_stats(rs.cells[s.label()]) for s in rs.strategies}

    def grid_rows(value_fn) -> list[str]:
        rows = []
        for s in singles:
            rows.append(f"{s.down_frac},{s.threshold_frac}," + value_fn(stats[s.label()], s))
        return rows

    def emit(name: str, header: str, rows: list[str]):
        path = out / name
        _write_csv(path, rs, header, rows)
        written.append(path)

    fmt = lambda x: format(x, ".6f")

    emit("gains.csv", "down_frac,threshold_frac,wealth_change_death_pct,welfare_change_death_pct",
         grid_rows(lambda st, s: f"{fmt(st['wealth_change_death'])},{fmt(st['welfare_change_death'])}"))

    base = stats[BASE_CELL.label()] if BASE_CELL.label() in stats else stats[singles[0].label()]
    emit("best_choice.csv", "down_frac,threshold_frac,wealth_vs_base,welfare_vs_base",
         grid_rows(lambda st, s: f"{fmt(100.0 * st['mean_W_death_o'] / base['mean_W_death_o'])},"
                                 f"{fmt(100.0 * st['welfare_level_post_o'] / base['welfare_level_post_o'])}"))

    emit("mdd.csv", "down_frac,threshold_frac,mdd_change_life_pp,mdd_change_pre_pp,mdd_change_post_pp",
         grid_rows(lambda st, s: f"{fmt(st['mdd_change_life'])},{fmt(st['mdd_change_pre'])},{fmt(st['mdd_change_post'])}"))

    emit("gini.csv", "down_frac,threshold_frac,gini_owner,gini_renter,gini_change_pct",
         grid_rows(lambda st, s: f"{fmt(st['gini_o'])},{fmt(st['gini_r'])},{fmt(st['gini_change'])}"))

    emit("costs.csv", "down_frac,threshold_frac,wealth_change_ret_pct,fin_change_ret_pct,fin_change_death_pct",
         grid_rows(lambda st, s: f"{fmt(st['wealth_change_ret'])},{fmt(st['fin_change_ret'])},{fmt(st['fin_change_death'])}"))

    emit("welfare_dissection.csv", "down_frac,threshold_frac,welfare_cons_change_pct,welfare_beq_change_pct",
         grid_rows(lambda st, s: f"{fmt(st['welfare_cons_change'])},{fmt(st['welfare_beq_change'])}"))

    emit("counts.csv",
         "down_frac,threshold_frac,n_households,n_purchased,n_second,sales,defaults,rm_originations,"
         "match_violation_years,matched_years",
         [f"{s.down_frac},{s.threshold_frac},{rs.cells[s.label()].n_total},{rs.cells[s.label()].n_purchased},"
          f"{rs.cells[s.label()].n_second},{rs.cells[s.label()].counts['sales']},"
          f"{rs.cells[s.label()].counts['defaults']},{rs.cells[s.label()].counts['rm_originations']},"
          f"{rs.cells[s.label()].counts['match_violations']},{rs.cells[s.label()].counts['matched_years']}"
          for s in rs.strategies])

    # heterogeneity brackets from the base cell's per-household detail
    base_label = BASE_CELL.label() if BASE_CELL.label() in rs.cells else singles[0].label()
    agg = rs.cells[base_label]
    if agg.detail is not None:
        detail = {k: np.concatenate(v) for k, v in agg.detail.items()}
        mask = detail["purchased"].astype(bool)
        rows = []
        for key_name, key_field in (("income", "purch_income"), ("hpi", "purch_hpi"), ("interest", "purch_rate")):
            rows.extend(_bracket_change_rows(detail, key_name, detail[key_field], mask))
        emit("heterogeneity.csv", "key,outcome,bracket,value", rows)

    # age profiles for the base cell and the delayed-purchase comparison cell
    profile_cells = [s for s in singles if s.label() in (BASE_CELL.label(), Strategy(0.1, 0.5).label())]
    rows = []
    for s in profile_cells:
        prof = rs.cells[s.label()].profile
        cnt = np.maximum(prof["count"], 1)
        for t in range(HORIZON):
            if prof["count"][t] == 0:
                continue
            rows.append(
                f"{s.label()},{25 + t}," + ",".join(
                    fmt(prof[f][t] / cnt[t]) for f in ("W_o", "F_o", "C_o", "W_r", "F_r", "C_r")
                )
            )
    if rows:
        emit("age_profile.csv", "cell,age,mean_W_owner,mean_F_owner,mean_C_owner,mean_W_renter,mean_F_renter,mean_C_renter", rows)

    # second-home comparisons against the single-home base cell, conditioned
    # on the same households (those that bought the second home in the cell)
    seconds = _second_cells(rs)
    if seconds:
        base_det = {k: np.concatenate(v) for k, v in rs.cells[base_label].detail.items()}
        eqw = metrics.equivalent_wealth
        rows_w, rows_v = [], []
        for s in seconds:
            det2 = {k: np.concatenate(v) for k, v in rs.cells[s.label()].detail.items()}
            mask = det2["second_purchased"].astype(bool)
            mask_ret = mask & det2["alive_at_ret"].astype(bool)

            def chg(field, m, xform=None):
                a = det2[field][m].mean()
                b = base_det[field][m].mean()
                if xform is not None:
                    a, b = xform(a), xform(b)
                return 100.0 * (a / b - 1.0)

            w_ret = chg("W_ret_o", mask_ret)
            f_ret = chg("F_ret_o", mask_ret)
            w_death = chg("W_death_o", mask)
            f_death = chg("F_death_o", mask)
            rows_w.append(f"{s.second_down_frac},{s.second_threshold_frac},{fmt(w_ret)},{fmt(f_ret)},{fmt(w_death)},{fmt(f_death)}")
            v_life = chg("U_life_o", mask, eqw)
            v_pre = chg("U_pre_o", mask, eqw)
            v_post = chg("U_post_o", mask, eqw)
            v_cons = chg("U_cons_life_o", mask, eqw)
            v_beq = chg("U_beq_o", mask, eqw)
            rows_v.append(f"{s.second_down_frac},{s.second_threshold_frac},{fmt(v_life)},{fmt(v_pre)},{fmt(v_post)},{fmt(v_cons)},{fmt(v_beq)}")
        emit("second_home_wealth.csv",
             "second_down_frac,second_threshold_frac,wealth_change_ret_pct,fin_change_ret_pct,wealth_change_death_pct,fin_change_death_pct",
             rows_w)
        emit("second_home_welfare.csv",
             "second_down_frac,second_threshold_frac,welfare_change_death_pct,welfare_change_pre_pct,welfare_change_post_pct,welfare_cons_change_pct,welfare_beq_change_pct",
             rows_v)

    (out / "validation.txt").write_text(rs.panel_report + "\n", encoding="utf-8")
    written.append(out / "validation.txt")
    return written


def write_comparison_table(cfg: RunConfig, comparison: dict, out_dir, panel_fingerprint: str = "") -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rs = ResultSet(cfg=cfg, strategies=[], cells={}, panel_fingerprint=panel_fingerprint,
                   panel_report="", timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat())
    rows = []
    for name in COMPARISON_STRATEGIES:
        for t in range(HORIZON):
            mean = float(comparison[name]["mean_log_wealth"][t])
            std = float(comparison[name]["std_log_wealth"][t])
            rows.append(f"{name},{t + 1},{mean!r},{std!r}")
    path = out / "comparison.csv"
    _write_csv(path, rs, "strategy,year,mean_log_wealth,std_log_wealth", rows)
    return path
