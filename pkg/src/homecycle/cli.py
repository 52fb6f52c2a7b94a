"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from homecycle.config import ConfigError, build_config, read_config_file
from homecycle.mortality import LifeTableError
from homecycle.panel import PanelError


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="homecycle",
        description="Life-cycle homeownership vs all-equity renting simulator",
    )
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--data-dir", dest="data_dir", help="panel CSV or directory")
    p.add_argument("--countries", help="comma list of codes or alias us|uk|europe")
    p.add_argument("--households", type=int, help="number of households")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--mode", choices=["grid", "comparison"], help="run mode")
    p.add_argument("--down-fracs", dest="down_fracs", help="comma list of down payments")
    p.add_argument("--threshold-fracs", dest="threshold_fracs", help="comma list of purchase thresholds")
    p.add_argument("--second-home", dest="second_home", action="store_const", const="true",
                   help="add second-home cells (first home fixed at 10/10)")
    p.add_argument("--replacement", type=float, help="social security replacement rate")
    p.add_argument("--income-target-45", dest="income_target_45", type=float,
                   help="mean-log-earnings anchor at age 45, 2024 USD")
    p.add_argument("--comparison-paths", dest="comparison_paths", type=int,
                   help="paths for comparison mode")
    p.add_argument("--dump-trajectories", dest="dump_trajectories", action="store_const",
                   const="true", help="write per-household trajectory CSVs")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        file_values = read_config_file(args.config) if args.config else {}
        overrides = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
        cfg = build_config(file_values, overrides)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    from homecycle import runner

    try:
        panel = runner.load_run_panel(cfg)
    except (PanelError, LifeTableError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2

    try:
        if cfg.mode == "comparison":
            comparison = runner.run_strategy_comparison(cfg, panel)
            path = runner.write_comparison_table(cfg, comparison, cfg.out_dir, panel.fingerprint)
            print(f"wrote {path}")
        else:
            rs = runner.run_grid(cfg, panel)
            written = runner.write_tables(rs, cfg.out_dir)
            if cfg.dump_trajectories:
                written.append(dump_trajectories(cfg, panel))
            for w in written:
                print(f"wrote {w}")
    except (PanelError, LifeTableError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and use the runtime exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    return 0


def dump_trajectories(cfg, panel, n_dump: int = 100) -> Path:
    """Per-household debug dump of the base cell's paired trajectories."""
    import numpy as np
    import pandas as pd

    from homecycle.engine import draw_household_inputs, simulate_cell
    from homecycle.housing import default_plf_table_path, load_plf_table
    from homecycle.runner import BASE_CELL

    n = min(n_dump, cfg.households)
    inputs = draw_household_inputs(panel, cfg.seed, np.arange(n), cfg.replacement, cfg.income_target_45)
    out = simulate_cell(inputs, BASE_CELL, load_plf_table(default_plf_table_path()), record_paths=True)
    frames = []
    for i in range(n):
        hh = pd.DataFrame({
            "household": i,
            "age": 25 + np.arange(inputs.T),
            "active": inputs.active[i],
            "consumption_owner": out.paths["C_o"][i],
            "consumption_renter": out.paths["C_r"][i],
            "wealth_owner": out.paths["W_o"][i],
            "wealth_renter": out.paths["W_r"][i],
            "assets_owner": out.paths["F_o"][i],
            "assets_renter": out.paths["F_r"][i],
        })
        frames.append(hh[hh["active"]])
    path = Path(cfg.out_dir) / "trajectories.csv"
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)
    return path


if __name__ == "__main__":
    raise SystemExit(main())
