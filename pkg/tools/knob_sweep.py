"""Calibration dashboard: rebuild the panel in memory for one or more knob
combos and print the acceptance-relevant statistics against their targets.

Usage:
    python tools/knob_sweep.py 20000 "dict(rent_mean=0.036)" ...

Keys prefixed cfg_ are routed to the run configuration instead of the panel
generator (e.g. cfg_seed, cfg_replacement).
"""

import os
import sys
import tempfile
import time
from dataclasses import replace

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))
from make_panel import Knobs, generate, write_csv  # noqa: E402

from homecycle import runner  # noqa: E402
from homecycle.config import build_config  # noqa: E402
from homecycle.engine import Strategy  # noqa: E402
from homecycle.panel import load_panel, rescale_hpi  # noqa: E402
from homecycle.runner import BASE_CELL, cell_stats  # noqa: E402


def panel_from_knobs(knobs: Knobs):
    recs = generate(knobs)
    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
        tmp = fh.name
    write_csv(recs, tmp)
    panel = rescale_hpi(load_panel(tmp))
    os.unlink(tmp)
    return panel


def dashboard(panel, n, seed=7, threads=2, full=False, cfg_extra=None):
    overrides = {"households": str(n), "seed": str(seed), "threads": str(threads), "out_dir": "/tmp/cal"}
    if cfg_extra:
        overrides.update({k: str(v) for k, v in cfg_extra.items()})
    if not full:
        overrides.setdefault("down_fracs", "0.1,0.2,0.5,1.0")
        overrides.setdefault("threshold_fracs", "0.1,0.5")
    cfg = build_config(overrides=overrides)
    rs = runner.run_grid(cfg, panel)
    stats = {s.label(): cell_stats(rs.cells[s.label()]) for s in rs.strategies}
    base = stats[BASE_CELL.label()]
    c2050 = stats[Strategy(0.2, 0.5).label()]
    sign = {}
    for key, want in (("wealth_change_ret", "<0"), ("welfare_change_death", ">0"),
                      ("gini_change", "<0"), ("mdd_change_life", ">0")):
        vals = np.array([stats[s.label()][key] for s in rs.strategies])
        sign[key] = ("PASS" if ((vals < 0).all() if want == "<0" else (vals > 0).all()) else "FAIL",
                     float(vals.min()), float(vals.max()))
    return {
        "t1_wret_1010": base["wealth_change_ret"],
        "t2_wdeath_2050": c2050["wealth_change_death"],
        "t3_gini_1010": base["gini_change"],
        "welfare_1010": base["welfare_change_death"],
        "mdd_1010": base["mdd_change_life"],
        "purch": base["n_purchased"],
        "sign": sign,
    }


if __name__ == "__main__":
    n = int(sys.argv[1])
    combos = [eval(a) for a in sys.argv[2:]] or [dict()]
    for combo in combos:
        t0 = time.time()
        cfg_extra = {k[4:]: v for k, v in combo.items() if k.startswith("cfg_")}
        knobs = replace(Knobs(), **{k: v for k, v in combo.items() if not k.startswith("cfg_")})
        panel = panel_from_knobs(knobs)
        d = dashboard(panel, n, cfg_extra=cfg_extra)
        print(f"\n--- {combo} [{time.time()-t0:.0f}s]")
        print(f"  10/10 W@ret {d['t1_wret_1010']:+7.2f} (want -19.24+-5) | "
              f"20/50 W@death {d['t2_wdeath_2050']:+7.2f} (want +9.58+-5) | "
              f"gini {d['t3_gini_1010']:+7.2f} (want -14.96+-5)")
        print(f"  10/10 welfare@death {d['welfare_1010']:+7.2f} | mdd {d['mdd_1010']:+6.2f} | purchased {d['purch']}")
        for k, v in d["sign"].items():
            print(f"  sign {k:22s} {v[0]}  [{v[1]:+.2f}, {v[2]:+.2f}]")
