"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each. Run with `pytest -s tests/test_acceptance.py`.

Desk scale: 100,000 households on the bundled global panel with the default
configuration. The full grid is simulated once and shared across criteria.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.stats

from homecycle import metrics, runner
from homecycle.bootstrap import GEOMETRIC_P, draw_block_length, sample_path
from homecycle.config import build_config
from homecycle.constants import WORKING_YEARS
from homecycle.engine import Strategy, draw_household_inputs, simulate_cell
from homecycle.housing import default_plf_table_path, load_plf_table
from homecycle.income import DEFAULT_PROCESS, draw_individual_params, simulate_income_path
from homecycle.rng import STREAM_PATH, household_stream
from homecycle.runner import BASE_CELL, cell_stats

N_DESK = 100_000
REPORT: list[str] = []


def record(criterion: str, passed: bool, detail: str = ""):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f"  ({detail})" if detail else "")
    REPORT.append(line)
    print(line, file=sys.stderr)
    assert passed, line


@pytest.fixture(scope="session", autouse=True)
def write_report():
    yield
    Path("acceptance_report.txt").write_text("\n".join(REPORT) + "\n")


@pytest.fixture(scope="session")
def desk_cfg():
    return build_config(overrides={"households": str(N_DESK), "threads": "2",
                                   "out_dir": "/tmp/acceptance"})


@pytest.fixture(scope="session")
def desk_grid(desk_cfg):
    t0 = time.time()
    rs = runner.run_grid(desk_cfg)
    elapsed = time.time() - t0
    print(f"\n[desk grid: {N_DESK} households x {len(rs.strategies)} cells "
          f"in {elapsed / 60:.1f} min]", file=sys.stderr)
    assert elapsed < 3600
    return rs


@pytest.fixture(scope="session")
def desk_stats(desk_grid):
    return {s.label(): cell_stats(desk_grid.cells[s.label()]) for s in desk_grid.strategies}


@pytest.fixture(scope="session")
def audit_sample(desk_cfg):
    panel = runner.load_run_panel(desk_cfg)
    inp = draw_household_inputs(panel, desk_cfg.seed, np.arange(1000),
                                desk_cfg.replacement, desk_cfg.income_target_45)
    plf = load_plf_table(default_plf_table_path())
    return inp, simulate_cell(inp, BASE_CELL, plf, record_paths=True, audit=True)


def test_budget_identity(audit_sample):
    inp, out = audit_sample
    a = out.paths["audit"]
    act = inp.active
    scale_o = np.maximum(np.abs(a["F1_o"]), 1.0)
    resid_assets = a["F1_o"] - (a["F0_o"] + a["proceeds_o"] - a["down_o"] + a["lump_o"] + a["invest_o"])
    resid_flow = a["invest_o"] - (a["income_o"] + a["rent_in"] + a["ssi_o"] - a["outlay_o"] - out.paths["C_o"])
    worst_o = max(np.abs(resid_assets[act] / scale_o[act]).max(),
                  np.abs(resid_flow[act] / scale_o[act]).max())
    scale_r = np.maximum(np.abs(a["F1_r"]), 1.0)
    resid_r = a["F1_r"] - (a["F0_r"] + a["invest_r"])
    resid_fr = a["invest_r"] - (a["income_o"] + a["ssi_r"] - a["rent_r"] - out.paths["C_r"])
    worst_r = max(np.abs(resid_r[act] / scale_r[act]).max(),
                  np.abs(resid_fr[act] / scale_r[act]).max())
    worst = max(worst_o, worst_r)
    record("budget identity closes to <=1e-9 relative (1,000-household audit, both arms)",
           worst <= 1e-9, f"worst {worst:.2e}")


def test_consumption_match(audit_sample, desk_grid):
    inp, out = audit_sample
    R = WORKING_YEARS
    act = inp.active[:, :R]
    matched = (out.purch_year[:, None] >= 0) & (np.arange(R)[None, :] >= out.purch_year[:, None]) & act
    dev = np.abs(out.paths["C_r"][:, :R] - out.paths["C_o"][:, :R]) / np.maximum(out.paths["C_o"][:, :R], 1.0)
    clean = matched & ~out.paths["violation"][:, :R]
    worst = dev[clean].max() if clean.any() else 0.0
    # violation frequency at full desk scale
    agg = desk_grid.cells[BASE_CELL.label()]
    rate = agg.counts["match_violations"] / (N_DESK * float(WORKING_YEARS))
    record("consumption match <=1e-9 relative outside flagged years",
           worst <= 1e-9, f"worst clean deviation {worst:.2e}")
    record("match-violation years < 0.5% of household-years",
           rate < 0.005, f"rate {rate:.4%}")


def test_bootstrap_block_lengths(desk_cfg):
    rng = np.random.default_rng(314)
    draws = np.array([draw_block_length(rng) for _ in range(100_000)])
    kmax = 60
    observed = np.bincount(np.minimum(draws, kmax), minlength=kmax + 1)[1:]
    p = GEOMETRIC_P
    probs = np.array([p * (1 - p) ** (k - 1) for k in range(1, kmax)] + [(1 - p) ** (kmax - 1)])
    stat, pval = scipy.stats.chisquare(observed, probs * len(draws))
    record("block lengths pass chi-squared vs Geometric(0.1) at 1%",
           pval > 0.01, f"p-value {pval:.3f}")

    panel = runner.load_run_panel(desk_cfg)
    ok = True
    for h in range(2000):
        path = sample_path(panel, rng=household_stream(desk_cfg.seed, h, STREAM_PATH))
        bounds = list(path.block_starts) + [len(path)]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if len(set(path.country_idx[lo:hi].tolist())) != 1 or not np.all(np.diff(path.source_years[lo:hi]) == 1):
                ok = False
    record("within-block country/year consecutiveness holds for 100% of blocks", ok)


def test_income_moments():
    rng = np.random.default_rng(2718)
    n = 100_000
    alpha = np.empty(n)
    beta = np.empty(n)
    nu_comp = []
    z40 = np.empty(n)
    for i in range(n):
        params = draw_individual_params(rng)
        alpha[i], beta[i] = params.alpha, params.beta
        path = simulate_income_path(params, rng=rng)
        z40[i] = path.z[-1]
        if i < 20_000:
            nu_comp.append(path.nu_component)
    corr = np.corrcoef(alpha, beta)[0, 1]
    p1 = np.concatenate(nu_comp).mean()
    zvar = z40.var()
    analytic = DEFAULT_PROCESS.z_variance(40)
    ok_corr = abs(corr - 0.768) <= 0.02
    ok_p = abs(p1 - DEFAULT_PROCESS.p_nu) <= 0.02
    ok_z = abs(zvar / analytic - 1.0) <= 0.02
    record("income moments: rho_alpha_beta within +-0.02", ok_corr, f"corr {corr:.3f}")
    record("income moments: mixture probability within +-0.02", ok_p, f"p {p1:.3f}")
    record("income moments: z-variance within 2% of analytic", ok_z,
           f"sim {zvar:.4f} vs analytic {analytic:.4f}")


def test_gini_oracle():
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 1001))
        w = rng.lognormal(12.0, rng.uniform(0.3, 1.6), size=n)
        worst = max(worst, abs(metrics.gini(w) - metrics.gini_bruteforce(w)))
    record("gini sort-based equals O(n^2) oracle within 1e-12 (200 instances)",
           worst <= 1e-12, f"worst {worst:.2e}")


def test_portfolio_comparison_ordering(desk_cfg):
    t0 = time.time()
    cfg = build_config(overrides={"households": "10", "seed": str(desk_cfg.seed),
                                  "comparison_paths": "1000000", "mode": "comparison"})
    comp = runner.run_strategy_comparison(cfg)
    elapsed = time.time() - t0
    m = {k: comp[k]["mean_log_wealth"][-1] for k in comp}
    s = {k: comp[k]["std_log_wealth"][-1] for k in comp}
    ok_order = m["stock_bond"] < m["stock_house"] < m["all_equity"]
    ratio = s["stock_house"] / s["stock_bond"]
    ok_std = abs(ratio - 1.0) <= 0.20
    record("portfolio comparison mean ordering at year 75 (1M paths)",
           ok_order, f"sb {m['stock_bond']:.3f} < sh {m['stock_house']:.3f} < eq {m['all_equity']:.3f}")
    record("std(stock-house) within 20% of std(stock-bond)", ok_std, f"ratio {ratio:.3f}")
    record("comparison runtime under 5 minutes", elapsed < 300, f"{elapsed:.0f}s")


def _sign_suite(desk_stats, key, positive):
    vals = np.array([st[key] for st in desk_stats.values()])
    return (vals > 0).all() if positive else (vals < 0).all(), vals


def test_sign_suite(desk_stats):
    ok, vals = _sign_suite(desk_stats, "wealth_change_ret", positive=False)
    record("sign suite (a): owner wealth change at retirement negative in every cell",
           ok, f"range [{vals.min():+.2f}, {vals.max():+.2f}]")
    ok, vals = _sign_suite(desk_stats, "welfare_change_death", positive=True)
    record("sign suite (b): owner welfare change at death positive in every cell",
           ok, f"range [{vals.min():+.2f}, {vals.max():+.2f}]")
    ok, vals = _sign_suite(desk_stats, "gini_change", positive=False)
    record("sign suite (c): gini change at retirement negative in every cell",
           ok, f"range [{vals.min():+.2f}, {vals.max():+.2f}]")
    ok, vals = _sign_suite(desk_stats, "mdd_change_life", positive=True)
    record("sign suite (d): max-drawdown change positive in every cell",
           ok, f"range [{vals.min():+.2f}, {vals.max():+.2f}]")


def test_magnitude_spot_check_wealth_at_retirement(desk_stats):
    got = desk_stats[BASE_CELL.label()]["wealth_change_ret"]
    record("spot check: 10/10 wealth at retirement near -19.24 (+-5pp)",
           abs(got - (-19.24)) <= 5.0, f"got {got:+.2f}")


def test_magnitude_spot_check_gini(desk_stats):
    got = desk_stats[BASE_CELL.label()]["gini_change"]
    record("spot check: 10/10 gini change near -14.96 (+-5pp)",
           abs(got - (-14.96)) <= 5.0, f"got {got:+.2f}")


def test_magnitude_spot_check_wealth_at_death(desk_stats):
    # Known red on the bundled synthetic panel: the at-death gain cannot reach
    # the +4.58..+14.58 window jointly with the other pinned criteria; see the
    # calibration notes in the repository docs.
    got = desk_stats[Strategy(0.2, 0.5).label()]["wealth_change_death"]
    record("spot check: 20%-down/50%-threshold wealth gain at death near 9.58 (+-5pp)",
           abs(got - 9.58) <= 5.0, f"got {got:+.2f}")


def test_determinism_across_thread_counts(tmp_path):
    outs = []
    for threads in ("1", "8"):
        out_dir = tmp_path / f"threads{threads}"
        cfg = build_config(overrides={
            "households": "20000", "threads": threads, "out_dir": str(out_dir),
            "down_fracs": "0.1,0.5", "threshold_fracs": "0.1,0.3",
        })
        rs = runner.run_grid(cfg)
        runner.write_tables(rs, out_dir)
        outs.append(out_dir)
    same = True
    for f in sorted(outs[0].glob("*.csv")):
        a = [l for l in f.read_text().splitlines() if not l.startswith("# timestamp")]
        b = [l for l in (outs[1] / f.name).read_text().splitlines() if not l.startswith("# timestamp")]
        if a != b:
            same = False
    record("determinism: 1 vs 8 worker threads yield byte-identical CSVs "
           "(excluding timestamp)", same)
