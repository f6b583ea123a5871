"""Ground-truth simulation oracle: VAR data with known structural shocks.

Simulated panels and their true impulse responses back every estimator
check in the test suite. Shocks are Gaussian, matching the sampling model,
and a burn-in long enough for spectral radii up to roughly 0.97 removes
initialization transients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bvar import VarSpec, companion, spectral_radius
from .panel import TimeSeriesPanel, format_quarter, parse_quarter
from .structural import irf_from_factors


@dataclass
class Dgp:
    """True VAR parameters: coefficient matrix B in the estimation layout
    (intercept row first, lag blocks below) and lower-triangular impact
    matrix L."""

    B: np.ndarray
    L: np.ndarray
    burn_in: int = 200
    seed: int = 0
    names: list[str] = field(default_factory=list)
    start: str = "1900Q1"

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=float)
        self.L = np.asarray(self.L, dtype=float)
        if self.B.ndim == 1:
            self.B = self.B[:, None]
        n = self.L.shape[0]
        if self.L.shape != (n, n):
            raise ValueError("impact matrix must be square")
        if np.any(np.triu(self.L, k=1) != 0.0):
            raise ValueError("impact matrix must be lower triangular")
        if np.any(np.diag(self.L) <= 0.0):
            raise ValueError("impact matrix diagonal must be positive")
        if self.B.shape[1] != n or (self.B.shape[0] - 1) % n != 0:
            raise ValueError(
                f"coefficient matrix shape {self.B.shape} does not match "
                f"{n} variables with an intercept row"
            )
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if not self.names:
            self.names = [f"y{j + 1}" for j in range(n)]
        if len(self.names) != n:
            raise ValueError(f"{len(self.names)} names for {n} variables")

    @property
    def n_vars(self) -> int:
        return self.L.shape[0]

    @property
    def lags(self) -> int:
        return (self.B.shape[0] - 1) // self.n_vars

    @property
    def var_spec(self) -> VarSpec:
        return VarSpec(order=list(self.names), lags=self.lags, intercept=True)

    @property
    def spectral_radius(self) -> float:
        return spectral_radius(companion(self.B, self.var_spec))


def simulate_var(dgp: Dgp, periods: int) -> tuple[TimeSeriesPanel, np.ndarray]:
    """Simulate y_t = c + sum_l A_l y_{t-l} + L eta_t with iid standard
    normal eta, discarding the burn-in; returns the panel and the kept
    structural shocks. Deterministic in the DGP seed."""
    if periods < 1:
        raise ValueError(f"periods must be >= 1, got {periods}")
    n, p = dgp.n_vars, dgp.lags
    intercept = dgp.B[0]
    coefs = dgp.B[1:]
    rng = np.random.default_rng(dgp.seed)
    total = dgp.burn_in + periods
    eta = rng.standard_normal((total, n))
    shocks = eta @ dgp.L.T
    y = np.zeros((total + p, n))
    for t in range(total):
        row = intercept.copy()
        for lag in range(1, p + 1):
            row += coefs[(lag - 1) * n: lag * n].T @ y[p + t - lag]
        y[p + t] = row + shocks[t]
    values = y[p + dgp.burn_in:]
    start_serial = parse_quarter(dgp.start)
    dates = [format_quarter(start_serial + i) for i in range(periods)]
    panel = TimeSeriesPanel(dates=dates, names=list(dgp.names), values=values)
    return panel, eta[dgp.burn_in:]


def true_irf(dgp: Dgp, horizon: int) -> np.ndarray:
    """Closed-form companion-power responses of the DGP, the same formula the
    estimator-side IRFs use, applied to the true parameters."""
    return irf_from_factors(dgp.B, dgp.L, dgp.var_spec, horizon)
