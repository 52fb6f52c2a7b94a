"""Generate the bundled multi-country annual macro-financial panel.

Synthetic 18-country history, 1870-2020, shaped like the public long-run
macro datasets: per-country AR structures for inflation, bond returns,
housing returns, price-to-income ratios, and rental yields, with correlated
stock/house/bond innovations. Cross-country correlation is irrelevant to the
simulator (bootstrap blocks never span countries) and is not modeled.

Pooled nominal stock and housing return moments over the 16 retained
countries are matched exactly by a final affine adjustment. The HPI column
ships as an index with USA 1990 = 100, to be re-anchored at load time.

Run: python tools/make_panel.py [--check]
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "src" / "homecycle" / "data" / "default_panel.csv"

COUNTRIES = [
    ("AUS", 1870), ("BEL", 1870), ("CHE", 1900), ("DEU", 1870), ("DNK", 1875),
    ("ESP", 1900), ("FIN", 1896), ("FRA", 1870), ("GBR", 1870), ("ITA", 1872),
    ("JPN", 1885), ("NLD", 1870), ("NOR", 1880), ("PRT", 1948), ("SWE", 1871),
    ("USA", 1890), ("CAN", 1902), ("IRL", 1995),
]
EXCLUDED = {"CAN", "IRL"}
END_YEAR = 2020
SEED = 18700731


@dataclass
class Knobs:
    stock_mean: float = 0.1124       # pooled nominal, matched exactly
    stock_std: float = 0.177
    house_mean: float = 0.0729       # pooled nominal, matched exactly
    house_std: float = 0.105
    bond_mean: float = 0.062
    infl_mean: float = 0.052
    rent_mean: float = 0.036
    hpi_mean: float = 4.15           # effective ratio level after anchoring
    # serial structure
    rho_infl: float = 0.60
    sig_infl: float = 0.030
    rho_house: float = 0.40
    rho_stock: float = 0.50
    rho_hpi: float = 0.97
    sig_hpi: float = 0.05
    rho_rent: float = 0.955
    sig_rent: float = 0.125
    # innovation correlations (stock, house, bond)
    rho_sh: float = 0.25
    rho_sb: float = 0.30
    rho_hb: float = 0.10
    sig_log_stock: float = 0.158
    sig_house_innov: float = 0.105
    bond_level_rho: float = 0.55
    bond_level_sig: float = 0.025
    bond_white_sig: float = 0.035


def generate(knobs: Knobs = Knobs(), seed: int = SEED):
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(np.array([
        [1.0, knobs.rho_sh, knobs.rho_sb],
        [knobs.rho_sh, 1.0, knobs.rho_hb],
        [knobs.rho_sb, knobs.rho_hb, 1.0],
    ]))

    records = {}
    for code, first in COUNTRIES:
        T = END_YEAR - first + 1
        mu_pi = knobs.infl_mean + rng.normal(0, 0.005)
        mu_b = knobs.bond_mean + rng.normal(0, 0.004)
        mu_s_log = np.log(1 + knobs.stock_mean) - 0.5 * knobs.sig_log_stock**2 + rng.normal(0, 0.008)
        mu_h = knobs.house_mean + rng.normal(0, 0.006)
        mu_hpi = knobs.hpi_mean * np.exp(rng.normal(0, 0.12))
        mu_rent = knobs.rent_mean * np.exp(rng.normal(0, 0.10))

        e = rng.standard_normal((T, 3)) @ chol.T
        sig_s_innov = knobs.sig_log_stock * np.sqrt(1.0 - knobs.rho_stock**2)
        e_pi = rng.standard_normal(T)
        e_hpi = rng.standard_normal(T)
        e_rent = rng.standard_normal(T)
        e_wage = rng.standard_normal(T)
        e_blevel = rng.standard_normal(T)

        pi = np.empty(T)
        s_dev = np.empty(T)
        h_dev = np.empty(T)
        ln_hpi = np.empty(T)
        ln_rent = np.empty(T)
        b_level = np.empty(T)
        prev_pi, prev_s, prev_h, prev_hpi, prev_rent, prev_bl = mu_pi, 0.0, 0.0, np.log(mu_hpi), np.log(mu_rent), 0.0
        for i in range(T):
            prev_pi = mu_pi + knobs.rho_infl * (prev_pi - mu_pi) + knobs.sig_infl * e_pi[i]
            pi[i] = prev_pi
            prev_s = knobs.rho_stock * prev_s + sig_s_innov * e[i, 0]
            s_dev[i] = prev_s
            prev_h = knobs.rho_house * prev_h + knobs.sig_house_innov * e[i, 1]
            h_dev[i] = prev_h
            prev_hpi = np.log(mu_hpi) + knobs.rho_hpi * (prev_hpi - np.log(mu_hpi)) \
                + 0.55 * prev_h + knobs.sig_hpi * e_hpi[i]
            ln_hpi[i] = prev_hpi
            prev_rent = np.log(mu_rent) + knobs.rho_rent * (prev_rent - np.log(mu_rent)) \
                - 0.35 * (prev_hpi - np.log(mu_hpi)) + knobs.sig_rent * e_rent[i]
            ln_rent[i] = prev_rent
            prev_bl = knobs.bond_level_rho * prev_bl + knobs.bond_level_sig * e_blevel[i]
            b_level[i] = prev_bl

        pi = np.clip(pi, -0.10, 0.30)
        stock = np.exp(mu_s_log + 0.35 * (pi - mu_pi) + s_dev) - 1.0
        house = mu_h + 0.80 * (pi - mu_pi) + h_dev
        house = np.clip(house, -0.60, 1.50)
        bond = mu_b + 0.55 * (pi - mu_pi) + b_level + knobs.bond_white_sig * e[:, 2]
        bond = np.clip(bond, -0.35, 0.60)
        rent = np.clip(np.exp(ln_rent), 0.010, 0.085)
        hpi = np.exp(ln_hpi)

        wage_growth = pi + 0.015 + 0.012 * e_wage
        wage = 100.0 * np.cumprod(1.0 + np.clip(wage_growth, -0.25, 0.40))
        idx_1990 = 1990 - first
        wage = wage / wage[idx_1990] * 100.0

        records[code] = dict(
            first=first, stock=stock, bond=bond, house=house,
            rent=rent, hpi=hpi, infl=pi, wage=wage,
        )

    # exact pooled moment match over the retained countries
    def pooled(fieldname):
        return np.concatenate([records[c][fieldname] for c, _ in COUNTRIES if c not in EXCLUDED])

    for fieldname, m_t, s_t in (("stock", knobs.stock_mean, knobs.stock_std),
                                ("house", knobs.house_mean, knobs.house_std)):
        pool = pooled(fieldname)
        m, s = pool.mean(), pool.std()
        for code, _ in COUNTRIES:
            x = records[code][fieldname]
            records[code][fieldname] = np.clip(m_t + (x - m) * (s_t / s), -0.95, None)
        pool = pooled(fieldname)
        shift = m_t - pool.mean()   # re-center after clipping
        for code, _ in COUNTRIES:
            records[code][fieldname] = records[code][fieldname] + shift

    # The loader re-anchors so USA 1990 = 4.14; the effective pooled ratio
    # level is therefore pooled_mean * 4.14 / usa_1990. Nudge the USA series
    # until that effective level equals the hpi_mean knob, then write the
    # index with USA 1990 = 100.
    for _ in range(20):
        pool_mean = pooled("hpi").mean()
        usa_1990 = records["USA"]["hpi"][1990 - records["USA"]["first"]]
        eff = pool_mean * 4.14 / usa_1990
        records["USA"]["hpi"] = records["USA"]["hpi"] * (eff / knobs.hpi_mean)
    usa_1990 = records["USA"]["hpi"][1990 - records["USA"]["first"]]
    index_scale = 100.0 / usa_1990
    for code, _ in COUNTRIES:
        records[code]["hpi_index"] = records[code]["hpi"] * index_scale
    # effective anchored ratio = index * 4.14 / 100 = hpi * 4.14 / usa_1990

    return records


def write_csv(records, path: Path) -> None:
    cols = "country,year,stock_return,bond_return,housing_return,rental_yield,hpi,inflation,wage_index"
    with open(path, "w") as fh:
        fh.write(cols + "\n")
        for code, _ in COUNTRIES:
            r = records[code]
            for i in range(len(r["stock"])):
                fh.write(",".join([
                    code, str(r["first"] + i),
                    repr(float(r["stock"][i])), repr(float(r["bond"][i])),
                    repr(float(r["house"][i])), repr(float(r["rent"][i])),
                    repr(float(r["hpi_index"][i])), repr(float(r["infl"][i])),
                    repr(float(r["wage"][i])),
                ]) + "\n")


def check(records) -> None:
    pooled = {
        k: np.concatenate([records[c][k] for c, _ in COUNTRIES if c not in EXCLUDED])
        for k in ("stock", "bond", "house", "rent", "hpi", "infl")
    }
    for k, v in pooled.items():
        print(f"{k:6s} mean={v.mean():+.4f} std={v.std():.4f} "
              f"p10={np.percentile(v, 10):+.4f} p90={np.percentile(v, 90):+.4f}")
    usa = records["USA"]
    usa_1990 = usa["hpi"][1990 - usa["first"]]
    eff = pooled["hpi"].mean() * 4.14 / usa_1990
    print("USA 1990 hpi ratio:", usa_1990, "index:", usa["hpi_index"][1990 - usa["first"]])
    print("effective pooled hpi after anchoring: %.3f" % eff)
    real_b = (1 + pooled["bond"]) / (1 + pooled["infl"]) - 1
    print(f"real bond mean={real_b.mean():+.4f} p10={np.percentile(real_b, 10):+.4f} "
          f"p20={np.percentile(real_b, 20):+.4f}")
    n = sum(len(records[c][0] if False else records[c]["stock"]) for c, _ in COUNTRIES if c not in EXCLUDED)
    print("retained country-years:", n)


if __name__ == "__main__":
    import sys

    recs = generate()
    write_csv(recs, OUT)
    print("wrote", OUT)
    if "--check" in sys.argv:
        check(recs)
