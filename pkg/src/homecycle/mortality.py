"""Individual lifespans from an actuarial life table.

Households are a same-age male/female couple starting at 25. Death happens
at year-end after that year's income and consumption. Surviving every annual
hazard through age 99 means dying upon turning 100, so the last lived age is
99 and no lifetime exceeds the 75-year market horizon.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from homecycle.constants import MAX_AGE, START_AGE

SEXES = ("male", "female")


class LifeTableError(ValueError):
    pass


@dataclass
class LifeTable:
    """Death probability q by (sex, age); q at the cap age is forced to 1."""

    q: dict  # sex -> np.ndarray indexed by age 0..MAX_AGE

    def hazard_vector(self, sex: str) -> np.ndarray:
        """q for ages START_AGE..MAX_AGE-1 (the ages actually simulated)."""
        return self.q[sex][START_AGE:MAX_AGE]

    def expected_death_age(self, sex: str) -> float:
        """Closed-form expectation of the simulated death age."""
        qv = self.hazard_vector(sex)
        ages = np.arange(START_AGE, MAX_AGE)
        surv = np.concatenate([[1.0], np.cumprod(1.0 - qv)])
        p_die_at = surv[:-1] * qv
        p_survive_all = surv[-1]
        return float(np.sum(ages * p_die_at) + MAX_AGE * p_survive_all)


def load_life_table(path) -> LifeTable:
    """Load a CSV with columns sex, age, death_probability."""
    df = pd.read_csv(path)
    needed = {"sex", "age", "death_probability"}
    missing = needed - set(df.columns)
    if missing:
        raise LifeTableError(f"life table missing column(s): {', '.join(sorted(missing))}")

    q = {}
    for sex in SEXES:
        sub = df[df["sex"].str.lower() == sex]
        ages = sub["age"].to_numpy(dtype=int)
        have = set(ages)
        needed_ages = set(range(START_AGE, MAX_AGE + 1))
        gaps = sorted(needed_ages - have)
        if gaps:
            raise LifeTableError(f"{sex}: missing age rows {gaps[0]}..{gaps[-1]} in [{START_AGE},{MAX_AGE}]")
        vec = np.zeros(121)
        vec[ages] = sub["death_probability"].to_numpy(dtype=float)
        if np.any((vec < 0) | (vec > 1)):
            raise LifeTableError(f"{sex}: death probabilities outside [0, 1]")
        vec[MAX_AGE:] = 1.0
        q[sex] = vec
    return LifeTable(q=q)


def default_life_table_path() -> Path:
    return Path(__file__).parent / "data" / "life_table.csv"


def simulate_lifespan(sex: str, table: LifeTable, rng: np.random.Generator) -> int:
    """Draw one death age: first age in 25..99 whose hazard fires, else 100."""
    u = rng.random(MAX_AGE - START_AGE)
    return int(death_age_from_uniforms(u, table.hazard_vector(sex)))


def death_age_from_uniforms(u: np.ndarray, hazard: np.ndarray) -> np.ndarray:
    """Vectorized death ages from uniforms of shape (..., MAX_AGE-START_AGE)."""
    fired = u < hazard
    any_fired = fired.any(axis=-1)
    first = fired.argmax(axis=-1)
    return np.where(any_fired, START_AGE + first, MAX_AGE)


def last_lived_age(death_age) -> np.ndarray:
    """Last age with economic activity: death at the cap means age 99 was
    the final lived year."""
    return np.minimum(np.asarray(death_age), MAX_AGE - 1)


@dataclass(frozen=True)
class LifespanPair:
    """Death ages of the couple and the household's end."""

    death_age_male: int
    death_age_female: int

    @property
    def household_end_age(self) -> int:
        """Last age the household exists (final lived year of the survivor)."""
        return int(max(last_lived_age(self.death_age_male), last_lived_age(self.death_age_female)))

    @property
    def n_years(self) -> int:
        return self.household_end_age - START_AGE + 1


def alive_count(t: int, pair: LifespanPair) -> int:
    """Members alive during simulation year t (age START_AGE + t)."""
    age = START_AGE + t
    alive = 0
    for d in (pair.death_age_male, pair.death_age_female):
        if age <= last_lived_age(d):
            alive += 1
    return alive
