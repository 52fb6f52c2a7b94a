import numpy as np
import pytest

from homecycle.panel import MacroPanel, load_panel, rescale_hpi, default_panel_path


def make_panel_csv(path, countries, start=1990, years=12, field_fn=None):
    """Write a small synthetic long-format panel CSV."""
    rows = ["country,year,stock_return,bond_return,housing_return,rental_yield,hpi,inflation,wage_index"]
    for code in countries:
        for j in range(years):
            year = start + j
            f = field_fn(code, year) if field_fn else {}
            rows.append(",".join([
                code, str(year),
                repr(f.get("stock_return", 0.06)),
                repr(f.get("bond_return", 0.03)),
                repr(f.get("housing_return", 0.02)),
                repr(f.get("rental_yield", 0.05)),
                repr(f.get("hpi", 100.0)),
                repr(f.get("inflation", 0.02)),
                repr(f.get("wage_index", 100.0)),
            ]))
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture(scope="session")
def bundled_panel():
    return rescale_hpi(load_panel(default_panel_path()))


@pytest.fixture()
def tiny_panel(tmp_path):
    csv = make_panel_csv(tmp_path / "panel.csv", ["USA", "GBR"], start=1980, years=30)
    return load_panel(csv)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
