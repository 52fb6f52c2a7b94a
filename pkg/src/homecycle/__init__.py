"""Life-cycle Monte Carlo simulator for homeownership vs. all-equity renting.

The package bootstraps multi-country macro-financial history into per-household
economic environments, simulates paired homeowner/renter lifetimes under
exogenous purchase rules, and aggregates wealth, welfare, drawdown, and
inequality statistics across strategy grids.
"""

from homecycle.panel import MacroPanel, load_panel, rescale_hpi, to_real

__all__ = ["MacroPanel", "load_panel", "rescale_hpi", "to_real"]

__version__ = "0.1.0"
