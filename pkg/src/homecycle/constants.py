"""Economy-wide model constants shared across modules.

All dollar figures are real 2024 USD. Values that are calibration inputs
rather than data (spreads, cost rates, utility curvature) live here; anything
configurable at run time is mirrored in config.RunConfig with these defaults.
"""

# Life cycle timing
START_AGE = 25
RETIRE_AGE = 65
MAX_AGE = 100          # nobody lives past turning 100
HORIZON = MAX_AGE - START_AGE        # 75 annual periods, ages 25..99
WORKING_YEARS = RETIRE_AGE - START_AGE   # 40

# Credit market
MORTGAGE_SPREAD = 0.0185
REVERSE_MORTGAGE_SPREAD = 0.0335
MORTGAGE_TERM = 30

# Housing cost rates (fractions of home value)
MAINTENANCE_RATE = 0.025
TRANSACTION_COST_RATE = 0.03

# Reverse-mortgage origination costs (annual fee sits inside the rate spread)
RM_ORIGINATION_PCT = 0.02
RM_ORIGINATION_FLAT = 2_500.0

# Forced-liquidation loan-to-value threshold
LTV_LIMIT = 1.5

# Payment-to-income cap for mortgage qualification
PTI_CAP = 1.0 / 3.0

# Supplemental security income: minimum consumption floor (2024 USD/year)
SSI_INDIVIDUAL = 11_316.0
SSI_SPOUSE_ADDON = 5_664.0

# Retirement consumption rule
WITHDRAWAL_RATE = 0.04
RM_LOOKAHEAD_YEARS = 3

# Working-life savings rate applied to income net of housing costs
SAVINGS_RATE = 0.10

# Preferences
RISK_AVERSION = 3.84
BEQUEST_INTENSITY = 2_360.0
BEQUEST_CURVATURE = 490_000.0

# Bootstrap block length: geometric with this mean (years)
MEAN_BLOCK_YEARS = 10.0

# HPI anchor: US price-to-income ratio in the anchor year
HPI_ANCHOR_YEAR = 1990
HPI_ANCHOR_VALUE = 4.14
HPI_REFERENCE_COUNTRY = "USA"

# Countries dropped from simulations for data availability
DEFAULT_EXCLUDED = frozenset({"CAN", "IRL"})

# Regional filter aliases (the europe list is quoted as shipped; IRL drops out
# again through DEFAULT_EXCLUDED)
REGION_ALIASES = {
    "us": {"USA"},
    "uk": {"GBR"},
    "europe": {
        "BEL", "DNK", "FIN", "FRA", "DEU", "IRL",
        "ITA", "NLD", "NOR", "PRT", "SWE", "CHE",
    },
}


def minimum_consumption(household_size: int) -> float:
    """SSA minimum consumption floor for a household of 1 or 2."""
    return SSI_INDIVIDUAL + SSI_SPOUSE_ADDON * (household_size - 1)
