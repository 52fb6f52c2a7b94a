"""Calibration dashboard: run a desk-scale grid on the current bundled panel
and print the acceptance-relevant statistics against their targets.

Usage: python tools/calibrate.py [n_households] [--full]
"""

import sys
import time

import numpy as np

from homecycle import runner
from homecycle.config import build_config
from homecycle.engine import Strategy
from homecycle.runner import BASE_CELL, cell_stats


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 and sys.argv[1].isdigit() else 5000
    full = "--full" in sys.argv
    t0 = time.time()
    overrides = {"households": str(n), "seed": "7", "threads": "2", "out_dir": "/tmp/cal"}
    if not full:
        overrides["down_fracs"] = "0.1,0.2,0.5,1.0"
        overrides["threshold_fracs"] = "0.1,0.5"
    cfg = build_config(overrides=overrides)
    panel = runner.load_run_panel(cfg)
    rs = runner.run_grid(cfg, panel)
    print(f"[{time.time()-t0:.0f}s] n={n} cells={len(rs.strategies)}")

    stats = {s.label(): cell_stats(rs.cells[s.label()]) for s in rs.strategies}
    base = stats[BASE_CELL.label()]
    c2050 = stats[Strategy(0.2, 0.5).label()]

    print("\n=== magnitude targets ===")
    print(f"10/10 wealth@ret   {base['wealth_change_ret']:+7.2f}   target -19.24 +/-5")
    print(f"20/50 wealth@death {c2050['wealth_change_death']:+7.2f}   target  +9.58 +/-5")
    print(f"10/10 gini change  {base['gini_change']:+7.2f}   target -14.96 +/-5")

    print("\n=== sign suite over all single-home cells ===")
    singles = [s for s in rs.strategies if not s.allow_second_home]
    for key, want in (("wealth_change_ret", "<0"), ("welfare_change_death", ">0"),
                      ("gini_change", "<0"), ("mdd_change_life", ">0")):
        vals = np.array([stats[s.label()][key] for s in singles])
        ok = (vals < 0).all() if want == "<0" else (vals > 0).all()
        print(f"{key:22s} {want}: {'PASS' if ok else 'FAIL'}  range [{vals.min():+.2f}, {vals.max():+.2f}]")

    print("\n=== base cell detail ===")
    for k in ("n_purchased", "wealth_change_death", "welfare_change_death", "welfare_cons_change",
              "welfare_beq_change", "fin_change_ret", "fin_change_death",
              "mdd_change_life", "mdd_change_pre", "mdd_change_post"):
        v = base[k]
        print(f"{k:24s} {v:+9.3f}" if isinstance(v, float) else f"{k:24s} {v}")
    agg = rs.cells[BASE_CELL.label()]
    print("counts:", agg.counts, "n_second:", agg.n_second)

    print("\n=== grid slices (wealth@death / welfare@death) ===")
    for s in singles:
        st = stats[s.label()]
        print(f"d{s.down_frac:.1f}/t{s.threshold_frac:.1f}: "
              f"Wd {st['wealth_change_death']:+6.2f}  Vd {st['welfare_change_death']:+6.2f}  "
              f"Wr {st['wealth_change_ret']:+6.2f}  G {st['gini_change']:+6.2f}  M {st['mdd_change_life']:+6.2f}")


if __name__ == "__main__":
    main()
