"""Reduced-form VAR estimation and conjugate Normal-Inverse-Wishart sampling.

The VAR is y_t = c + A_1 y_{t-1} + ... + A_p y_{t-p} + e_t. Coefficients are
stored as a (n*p + 1) x n matrix B with the intercept row first and lag
blocks stacked below, one block per lag in variable order, so that
Y = X B + residuals with X rows [1, y_{t-1}, ..., y_{t-p}].

Posterior sampling is exact conjugate (no Gibbs chain): Sigma is drawn from
the inverse-Wishart posterior and B from the matric-normal conditional.
Draws with explosive companion dynamics are flagged but never discarded;
series enter in log levels, so unit roots are admissible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DataError, NumericalError
from .panel import TimeSeriesPanel

# Relative tolerance on singular values below which X is treated as singular.
_RANK_RTOL = 1e-10


@dataclass
class VarSpec:
    """Lag order, intercept flag, and the variable ordering that drives
    Cholesky identification."""

    order: list[str]
    lags: int = 4
    intercept: bool = True

    def __post_init__(self):
        if self.lags < 1:
            raise ValueError(f"lags must be >= 1, got {self.lags}")
        if len(set(self.order)) != len(self.order):
            raise ValueError("variable order contains duplicates")


@dataclass
class OlsFit:
    """OLS estimate of the reduced-form VAR, kept together with the data
    matrices so posterior updates need no re-assembly."""

    B: np.ndarray
    Sigma: np.ndarray
    residuals: np.ndarray
    X: np.ndarray
    Y: np.ndarray


@dataclass
class PriorSpec:
    """Conjugate NIW prior settings.

    ``flat`` is the improper no-shrinkage prior (posterior mean = OLS), used
    by the simulation oracles. ``minnesota`` centers each variable's first
    own lag at one (random-walk centering, appropriate for log levels) with
    overall tightness ``tightness`` and harmonic lag decay, embedded in the
    NIW row precision. ``nu0``/``s0`` default to n+2 and a diagonal scale
    built from univariate AR residual variances; both are ignored under the
    flat prior.
    """

    kind: str = "minnesota"
    tightness: float = 0.2
    nu0: float | None = None
    s0: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("flat", "minnesota"):
            raise ValueError(f"prior kind must be 'flat' or 'minnesota', got {self.kind!r}")
        if self.tightness <= 0:
            raise ValueError("tightness must be > 0")
        if self.s0 is not None:
            self.s0 = np.asarray(self.s0, dtype=float)
            if not np.allclose(self.s0, self.s0.T, atol=1e-10):
                raise ValueError("prior scale s0 must be symmetric")


@dataclass
class PosteriorDraw:
    """One (coefficient matrix, innovation covariance) draw from the
    NIW posterior, flagged unstable when the companion spectral radius
    is >= 1."""

    B: np.ndarray
    Sigma: np.ndarray
    stable: bool


def build_regressors(panel: TimeSeriesPanel, spec: VarSpec) -> tuple[np.ndarray, np.ndarray]:
    """Stack (Y, X) for the VAR: Y holds rows p+1..T of the ordered
    variables, X rows are [1, y_{t-1}, ..., y_{t-p}] flattened in
    variable order."""
    for name in spec.order:
        if name not in panel.names:
            raise DataError(f"variable {name!r} not in panel")
    p = spec.lags
    t, n = panel.n_periods, len(spec.order)
    if t <= n * p + 1:
        raise DataError(
            f"insufficient observations: T={t} needs T > n*p+1 = {n * p + 1}"
        )
    idx = [panel.names.index(name) for name in spec.order]
    data = panel.values[:, idx]
    y = data[p:]
    blocks = [data[p - lag: t - lag] for lag in range(1, p + 1)]
    x = np.concatenate(blocks, axis=1)
    if spec.intercept:
        x = np.concatenate([np.ones((t - p, 1)), x], axis=1)
    return y, x


def _check_full_rank(x: np.ndarray, what: str = "X") -> None:
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= _RANK_RTOL * sv[0]:
        cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
        raise NumericalError(
            f"rank-deficient {what}: condition number {cond:.3e}, "
            f"smallest singular value {sv[-1]:.3e}"
        )


def ols_estimate(y: np.ndarray, x: np.ndarray) -> OlsFit:
    """Equation-by-equation OLS; Sigma uses the MLE denominator (rows of Y)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if x.ndim == 1:
        x = x[:, None]
    if y.shape[0] != x.shape[0]:
        raise ValueError(f"Y has {y.shape[0]} rows but X has {x.shape[0]}")
    if x.shape[0] < x.shape[1]:
        raise NumericalError(
            f"rank-deficient X: {x.shape[0]} rows < {x.shape[1]} columns"
        )
    _check_full_rank(x)
    b, *_ = np.linalg.lstsq(x, y, rcond=None)
    residuals = y - x @ b
    sigma = residuals.T @ residuals / y.shape[0]
    return OlsFit(B=b, Sigma=sigma, residuals=residuals, X=x, Y=y)


def _infer_layout(fit: OlsFit) -> tuple[int, int, bool]:
    """Recover (n, p, intercept) from the fitted matrices."""
    k = fit.X.shape[1]
    n = fit.Y.shape[1]
    first_is_ones = bool(np.all(fit.X[:, 0] == 1.0))
    if (k - 1) % n == 0 and first_is_ones:
        has_const = True
    elif k % n == 0:
        has_const = False
    else:
        raise ValueError(f"X with {k} columns is not a VAR layout for n={n}")
    p = (k - int(has_const)) // n
    if p < 1:
        raise ValueError(f"X with {k} columns implies no lags for n={n}")
    return n, p, has_const


def _companion_from_blocks(coefs: np.ndarray, n: int, p: int) -> np.ndarray:
    top = coefs.T
    if p == 1:
        return top.copy()
    bottom = np.concatenate(
        [np.eye(n * (p - 1)), np.zeros((n * (p - 1), n))], axis=1
    )
    return np.concatenate([top, bottom], axis=0)


def companion(b: np.ndarray, spec: VarSpec) -> np.ndarray:
    """Companion matrix of the VAR(p): lag coefficient transposes on the top
    block row, identity blocks on the sub-diagonal."""
    b = np.asarray(b, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    n = b.shape[1]
    expected = n * spec.lags + int(spec.intercept)
    if b.shape[0] != expected:
        raise ValueError(
            f"B has {b.shape[0]} rows; expected {expected} for n={n}, "
            f"p={spec.lags}, intercept={spec.intercept}"
        )
    coefs = b[1:] if spec.intercept else b
    return _companion_from_blocks(coefs, n, spec.lags)


def spectral_radius(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(matrix))))


def _ar_residual_scales(fit: OlsFit, n: int, p: int, has_const: bool) -> np.ndarray:
    """Residual standard deviation of a univariate AR(p) per variable,
    the usual scaling for cross-variable shrinkage."""
    scales = np.empty(n)
    base = int(has_const)
    for j in range(n):
        cols = [base + lag * n + j for lag in range(p)]
        xj = fit.X[:, cols]
        if has_const:
            xj = np.concatenate([np.ones((xj.shape[0], 1)), xj], axis=1)
        bj, *_ = np.linalg.lstsq(xj, fit.Y[:, j], rcond=None)
        resid = fit.Y[:, j] - xj @ bj
        scales[j] = np.sqrt(resid @ resid / resid.shape[0])
    if np.any(scales <= 0):
        raise NumericalError("zero AR residual scale; cannot build shrinkage prior")
    return scales


def _prior_moments(fit: OlsFit, prior: PriorSpec):
    """Prior mean, row precision, IW scale and degrees of freedom."""
    n, p, has_const = _infer_layout(fit)
    k = fit.X.shape[1]
    b0 = np.zeros((k, n))
    if prior.kind == "flat":
        return b0, np.zeros((k, k)), np.zeros((n, n)), 0.0
    scales = _ar_residual_scales(fit, n, p, has_const)
    b0[int(has_const): int(has_const) + n, :] = np.eye(n)
    omega_diag = np.empty(k)
    if has_const:
        omega_diag[0] = 1e6
    for lag in range(1, p + 1):
        for j in range(n):
            pos = int(has_const) + (lag - 1) * n + j
            omega_diag[pos] = (prior.tightness / lag) ** 2 / scales[j] ** 2
    precision = np.diag(1.0 / omega_diag)
    nu0 = float(prior.nu0) if prior.nu0 is not None else n + 2.0
    if nu0 < n + 2:
        raise ValueError(f"nu0 must be >= n+2 = {n + 2}")
    if prior.s0 is not None:
        s0 = prior.s0
        if s0.shape != (n, n):
            raise ValueError(f"s0 must be {n}x{n}")
    else:
        s0 = np.diag(scales**2) * (nu0 - n - 1.0)
    return b0, precision, s0, nu0


def posterior_moments(fit: OlsFit, prior: PriorSpec):
    """Conjugate NIW update: returns (B_bar, Omega_bar, S_bar, nu_bar) where
    B | Sigma ~ MN(B_bar, Omega_bar, Sigma) and Sigma ~ IW(S_bar, nu_bar)."""
    b0, precision0, s0, nu0 = _prior_moments(fit, prior)
    x, y = fit.X, fit.Y
    precision_post = precision0 + x.T @ x
    try:
        chol_prec = np.linalg.cholesky(precision_post)
    except np.linalg.LinAlgError:
        raise NumericalError("posterior row precision is not positive definite") from None
    identity = np.eye(precision_post.shape[0])
    inv_chol = np.linalg.solve(chol_prec, identity)
    omega_post = inv_chol.T @ inv_chol
    omega_post = 0.5 * (omega_post + omega_post.T)
    b_post = omega_post @ (precision0 @ b0 + x.T @ y)
    # Sum-of-PSD-terms form of the scale update; algebraically equal to
    # S0 + Y'Y + B0'P0 B0 - B_bar'P_bar B_bar but immune to cancellation.
    resid_post = y - x @ b_post
    shift = b_post - b0
    s_post = s0 + resid_post.T @ resid_post + shift.T @ precision0 @ shift
    s_post = 0.5 * (s_post + s_post.T)
    nu_post = nu0 + y.shape[0]
    return b_post, omega_post, s_post, nu_post


def posterior_mean(fit: OlsFit, prior: PriorSpec) -> np.ndarray:
    """Posterior mean of the coefficient matrix (equals OLS under the flat
    prior)."""
    return posterior_moments(fit, prior)[0]


def posterior_sample(
    fit: OlsFit, prior: PriorSpec, n_draws: int, seed: int
) -> list[PosteriorDraw]:
    """Exact conjugate sampling from the NIW posterior.

    Each draw's randomness derives from (seed, draw index) via spawned seed
    sequences, so the output is reproducible bit-for-bit and independent of
    any internal scheduling; the draw list is also prefix-stable in n_draws.
    """
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    n, p, has_const = _infer_layout(fit)
    b_post, omega_post, s_post, nu_post = posterior_moments(fit, prior)
    if nu_post < n + 1:
        raise NumericalError(
            f"posterior degrees of freedom {nu_post} too small for n={n}"
        )
    min_eig = float(np.linalg.eigvalsh(s_post)[0])
    if min_eig <= 0:
        raise NumericalError(
            f"posterior scale matrix not positive definite (smallest eigenvalue {min_eig:.3e})"
        )
    chol_row = np.linalg.cholesky(omega_post)
    k = b_post.shape[0]
    draws = []
    for child in np.random.SeedSequence(seed).spawn(n_draws):
        rng = np.random.default_rng(child)
        sigma = stats.invwishart.rvs(df=nu_post, scale=s_post, random_state=rng)
        sigma = np.atleast_2d(sigma)
        z = rng.standard_normal((k, n))
        b = b_post + chol_row @ z @ np.linalg.cholesky(sigma).T
        coefs = b[1:] if has_const else b
        comp = _companion_from_blocks(coefs, n, p)
        draws.append(
            PosteriorDraw(B=b, Sigma=sigma, stable=spectral_radius(comp) < 1.0)
        )
    return draws
