"""Working-life labor income with heterogeneity, mixture shocks, and
unemployment, plus retirement social security and the SSI consumption floor.

Log income is a deterministic age profile plus individual level/growth
heterogeneity, an AR(1) persistent state with two-normal mixture innovations,
a two-normal transitory shock, and a logistic unemployment hazard that wipes
the full year when it fires. Output is scaled to real 2024 USD through one
level factor anchored at the age-45 mean of log earnings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from homecycle.constants import WORKING_YEARS


@dataclass(frozen=True)
class IncomeProcessParams:
    """Parameter set of the income process (defaults follow the calibration)."""

    # deterministic profile g(t) = a0 + a1*t + a2*t^2, t = (age-24)/10
    a0: float = 2.581
    a1: float = 0.812
    a2: float = -0.185
    # ex-ante heterogeneity (alpha level, beta growth)
    sigma_alpha: float = 0.3
    sigma_beta: float = 0.196
    rho_alpha_beta: float = 0.768
    # persistent AR(1) state
    ar_coef: float = 0.959
    sigma_z0: float = 0.714
    p_nu: float = 0.407
    mu_nu: tuple[float, float] = (-0.085, 0.058)
    sigma_nu: tuple[float, float] = (0.364, 0.069)
    # transitory mixture
    p_eps: float = 0.13
    mu_eps: tuple[float, float] = (0.271, -0.040)
    sigma_eps: tuple[float, float] = (0.285, 0.037)
    # unemployment
    lambda_gamma: float = 0.0001
    a_xi: float = -3.036
    b_xi: float = -0.917
    c_xi: float = -5.397
    d_xi: float = -4.442

    def g(self, t):
        """Common log-income age profile at normalized age t."""
        return self.a0 + self.a1 * t + self.a2 * t * t

    @property
    def gamma_value(self) -> float:
        """Unemployment duration when the hazard fires (clamped at a full year)."""
        return min(1.0, math.exp(self.lambda_gamma))

    def level_scale(self, mean_income_at_45: float) -> float:
        """Scale factor mapping the profile to 2024 USD so that mean log
        earnings at age 45 equals log(mean_income_at_45)."""
        t45 = (45 - 24) / 10.0
        return mean_income_at_45 / math.exp(self.g(t45))

    def nu_moments(self) -> tuple[float, float]:
        """Mean and variance of the persistent-shock mixture."""
        p = self.p_nu
        m = p * self.mu_nu[0] + (1 - p) * self.mu_nu[1]
        ex2 = p * (self.mu_nu[0] ** 2 + self.sigma_nu[0] ** 2) + (1 - p) * (
            self.mu_nu[1] ** 2 + self.sigma_nu[1] ** 2
        )
        return m, ex2 - m * m

    def z_variance(self, t: int) -> float:
        """Var(z_t) from the AR(1) recursion with mixture innovations."""
        _, var_nu = self.nu_moments()
        v = self.sigma_z0**2
        for _ in range(t):
            v = self.ar_coef**2 * v + var_nu
        return v


DEFAULT_PROCESS = IncomeProcessParams()


@dataclass(frozen=True)
class IncomeParams:
    """Drawn individual heterogeneity."""

    alpha: float
    beta: float
    z0: float


@dataclass
class IncomePath:
    """Simulated income for one individual over the working life."""

    income: np.ndarray       # (T,) 2024 USD/year, zero in unemployment years
    z: np.ndarray            # (T,) persistent state
    gamma: np.ndarray        # (T,) unemployment duration in {0, 1}
    nu: np.ndarray = field(default=None, repr=False)          # innovations (diagnostics)
    eps: np.ndarray = field(default=None, repr=False)         # transitory shocks
    nu_component: np.ndarray = field(default=None, repr=False)  # True where first mixture comp


def normalized_age(year_index) -> np.ndarray:
    """t = (age - 24)/10 for working-year index 0 (age 25) onward."""
    return (np.asarray(year_index) + 1) / 10.0


def draw_individual_params(rng: np.random.Generator, process: IncomeProcessParams = DEFAULT_PROCESS) -> IncomeParams:
    """Draw (alpha, beta) from the bivariate normal and the initial state z0."""
    raw = rng.standard_normal(2)
    z0 = rng.standard_normal()
    alpha = process.sigma_alpha * raw[0]
    rho = process.rho_alpha_beta
    beta = process.sigma_beta * (rho * raw[0] + math.sqrt(max(0.0, 1 - rho * rho)) * raw[1])
    return IncomeParams(alpha=float(alpha), beta=float(beta), z0=float(process.sigma_z0 * z0))


def _draw_shock_raws(rng: np.random.Generator, T: int):
    """Raw uniform/normal draws for one individual's path, in fixed order."""
    nu_u = rng.random(T)
    nu_n = rng.standard_normal(T)
    eps_u = rng.random(T)
    eps_n = rng.standard_normal(T)
    unemp_u = rng.random(T)
    return nu_u, nu_n, eps_u, eps_n, unemp_u


def _paths_from_raws(alpha, beta, z0, nu_u, nu_n, eps_u, eps_n, unemp_u, scale, process):
    """Vectorized core: build income paths from raw draws.

    All leading dimensions broadcast; the time axis is last.
    """
    T = nu_u.shape[-1]
    comp1 = nu_u < process.p_nu
    nu = np.where(
        comp1,
        process.mu_nu[0] + process.sigma_nu[0] * nu_n,
        process.mu_nu[1] + process.sigma_nu[1] * nu_n,
    )
    eps = np.where(
        eps_u < process.p_eps,
        process.mu_eps[0] + process.sigma_eps[0] * eps_n,
        process.mu_eps[1] + process.sigma_eps[1] * eps_n,
    )

    z = np.empty_like(nu)
    gamma = np.zeros_like(nu)
    g_val = process.gamma_value
    z_prev = z0
    for j in range(T):
        z_t = process.ar_coef * z_prev + nu[..., j]
        z[..., j] = z_t
        t_norm = (j + 1) / 10.0
        xi = process.a_xi + process.b_xi * t_norm + (process.c_xi + process.d_xi * t_norm) * z_t
        p_unemp = 1.0 / (1.0 + np.exp(-xi))
        gamma[..., j] = np.where(unemp_u[..., j] < p_unemp, g_val, 0.0)
        z_prev = z_t

    j_idx = np.arange(T)
    t_norm = (j_idx + 1) / 10.0
    g_profile = process.g(t_norm)
    log_y = g_profile + alpha[..., None] + beta[..., None] * t_norm + z + eps
    income = (1.0 - gamma) * np.exp(log_y) * scale
    return income, z, gamma, nu, eps, comp1


def simulate_income_path(
    params: IncomeParams,
    working_years: int = WORKING_YEARS,
    rng: np.random.Generator | None = None,
    scale: float = 1.0,
    process: IncomeProcessParams = DEFAULT_PROCESS,
) -> IncomePath:
    """Simulate one individual's working-life income path."""
    if rng is None:
        raise ValueError("an explicit rng is required for reproducibility")
    raws = _draw_shock_raws(rng, working_years)
    alpha = np.asarray(params.alpha)
    beta = np.asarray(params.beta)
    income, z, gamma, nu, eps, comp1 = _paths_from_raws(
        alpha, beta, params.z0, *raws, scale=scale, process=process
    )
    return IncomePath(income=income, z=z, gamma=gamma, nu=nu, eps=eps, nu_component=comp1)


def social_security(last_income: float, replacement: float) -> float:
    """Constant retirement annuity: replacement fraction of the final
    working-year labor income."""
    if not 0.0 < replacement <= 1.0:
        raise ValueError("replacement rate must be in (0, 1]")
    return replacement * last_income


def ssi_topup(available_resources, household_size):
    """Top-up bringing a renter household's resources to the minimum
    consumption level. Zero when resources already cover it."""
    from homecycle.constants import minimum_consumption

    floor = minimum_consumption(household_size)
    return np.maximum(0.0, floor - np.asarray(available_resources, dtype=np.float64))[()]
