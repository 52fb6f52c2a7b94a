"""Generate the bundled life table and PLF grid data files.

The life table is a Gompertz-Makeham fit in SSA period-table format (sex,
age, death_probability for ages 0-119). The PLF grid follows the public HECM
tables' shape: factors rise with the youngest borrower's age and fall with
the expected rate, on ages 65-95 (step 5) x rates 3%-10% (step 1%).
"""

import math
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "homecycle" / "data"

# Makeham A + B * exp(C * age), fitted to recent SSA period tables
GM_PARAMS = {
    "male": (0.00053, 1.85e-05, 0.0955),
    "female": (0.00034, 0.97e-05, 0.1005),
}


def q_gm(age: int, sex: str) -> float:
    a, b, c = GM_PARAMS[sex]
    return min(1.0, a + b * math.exp(c * age))


def write_life_table(path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("sex,age,death_probability\n")
        for sex in ("male", "female"):
            for age in range(0, 120):
                q = 1.0 if age >= 119 else q_gm(age, sex)
                fh.write(f"{sex},{age},{q:.6f}\n")


def plf(age: int, rate: float) -> float:
    # Base factor at a 3% expected rate, rising with age; sensitivity to the
    # rate shrinks with age, mirroring the published HECM grids.
    base = 0.540 + 0.0070 * (age - 65)
    slope = 3.6 - 0.04 * (age - 65)
    value = base - slope * (rate - 0.03)
    return round(max(0.15, min(0.80, value)), 3)


def write_plf_table(path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("age,rate,plf\n")
        for age in range(65, 100, 5):
            for rate_pct in range(3, 11):
                fh.write(f"{age},{rate_pct / 100:.2f},{plf(age, rate_pct / 100):.3f}\n")


if __name__ == "__main__":
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_life_table(DATA_DIR / "life_table.csv")
    write_plf_table(DATA_DIR / "plf_table.csv")
    print("wrote", DATA_DIR / "life_table.csv")
    print("wrote", DATA_DIR / "plf_table.csv")
