"""Cumulative local-projection impulse responses with Newey-West inference.

For each horizon h the long difference y_{t+h} - y_{t-1} is regressed on an
intercept and the shock at t, over every t where both sides exist; the end
of the sample is dropped, never padded. Because the overlapping long
differences induce MA(h) errors, the HAC truncation lag is h+1 at horizon h.
The state-dependent variant interacts both regressors with a 0/1 regime
dummy dated at the shock, with no common intercept, which reproduces
split-sample point estimates exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError

_RANK_RTOL = 1e-10


@dataclass
class LocalProjectionResult:
    """Per-horizon intercepts, slopes, HAC standard errors of the slope, and
    effective sample sizes."""

    horizons: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    se: np.ndarray
    n_obs: np.ndarray


@dataclass
class StateLpResult:
    """Regime-split local projections: ``pre`` is the D=0 regime, ``post``
    the D=1 regime."""

    pre: LocalProjectionResult
    post: LocalProjectionResult
    dummy_name: str = "dummy"


def newey_west(x: np.ndarray, u: np.ndarray, lag: int) -> np.ndarray:
    """HAC coefficient covariance (X'X)^-1 M (X'X)^-1 with Bartlett weights.

    M = Gamma_0 + sum_{l=1..lag} (1 - l/(lag+1)) (Gamma_l + Gamma_l') where
    Gamma_l = sum_t (x_t u_t)(x_{t-l} u_{t-l})'. lag = 0 collapses to the
    heteroskedasticity-robust (White) covariance.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float).ravel()
    if x.ndim == 1:
        x = x[:, None]
    t = x.shape[0]
    if u.shape[0] != t:
        raise ValueError(f"residuals length {u.shape[0]} != {t} rows of X")
    if lag < 0:
        raise ValueError(f"truncation lag must be >= 0, got {lag}")
    if lag >= t:
        raise ValueError(f"truncation lag {lag} must be < T = {t}")
    sv = np.linalg.svd(x, compute_uv=False)
    if x.shape[0] < x.shape[1] or sv[-1] <= _RANK_RTOL * sv[0]:
        raise NumericalError("rank-deficient regressor matrix in HAC estimator")
    scores = x * u[:, None]
    meat = scores.T @ scores
    for ell in range(1, lag + 1):
        gamma = scores[ell:].T @ scores[:-ell]
        meat += (1.0 - ell / (lag + 1.0)) * (gamma + gamma.T)
    bread = np.linalg.inv(x.T @ x)
    return bread @ meat @ bread


def _usable(y: np.ndarray, shock: np.ndarray, h: int):
    """Long difference and shock aligned over all usable t for horizon h."""
    t = y.shape[0]
    n_obs = t - 1 - h
    lhs = y[1 + h:] - y[: n_obs]
    s = shock[1: t - h]
    return lhs, s, n_obs


def _check_horizon_sample(n_obs: int, h: int) -> None:
    # The HAC lag h+1 must also fit inside the usable sample.
    if n_obs < 3 or h + 1 >= n_obs:
        raise DataError(f"too few usable observations at horizon {h} (n={n_obs})")


def lp_irf(y: np.ndarray, shock: np.ndarray, horizon: int) -> LocalProjectionResult:
    """Local-projection responses of y to the shock over horizons 0..horizon."""
    y = np.asarray(y, dtype=float).ravel()
    shock = np.asarray(shock, dtype=float).ravel()
    if y.shape[0] != shock.shape[0]:
        raise ValueError(f"series length mismatch: {y.shape[0]} vs {shock.shape[0]}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    if np.var(shock) == 0.0:
        raise DataError("constant shock series")
    alpha = np.empty(horizon + 1)
    beta = np.empty(horizon + 1)
    se = np.empty(horizon + 1)
    n_obs = np.empty(horizon + 1, dtype=int)
    for h in range(horizon + 1):
        lhs, s, n_h = _usable(y, shock, h)
        _check_horizon_sample(n_h, h)
        if np.var(s) == 0.0:
            raise DataError(f"constant shock over the usable sample at horizon {h}")
        x = np.column_stack([np.ones(n_h), s])
        coef, *_ = np.linalg.lstsq(x, lhs, rcond=None)
        resid = lhs - x @ coef
        cov = newey_west(x, resid, h + 1)
        alpha[h], beta[h] = coef
        se[h] = np.sqrt(cov[1, 1])
        n_obs[h] = n_h
    return LocalProjectionResult(
        horizons=np.arange(horizon + 1), alpha=alpha, beta=beta, se=se, n_obs=n_obs
    )


def lp_irf_state(
    y: np.ndarray, shock: np.ndarray, dummy: np.ndarray, horizon: int
) -> StateLpResult:
    """Regime-dependent local projections.

    One regression per horizon with regressors [D, D*shock, 1-D, (1-D)*shock]
    and no common intercept; point estimates coincide with split-sample
    regressions because the two regressor blocks are orthogonal.
    """
    y = np.asarray(y, dtype=float).ravel()
    shock = np.asarray(shock, dtype=float).ravel()
    dummy = np.asarray(dummy, dtype=float).ravel()
    if not (y.shape[0] == shock.shape[0] == dummy.shape[0]):
        raise ValueError("series length mismatch")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    bad = np.setdiff1d(np.unique(dummy), [0.0, 1.0])
    if bad.size:
        raise DataError(f"dummy must be 0/1, found value {bad[0]!r}")
    if np.var(shock) == 0.0:
        raise DataError("constant shock series")

    shape = (horizon + 1,)
    results = {
        regime: {
            "alpha": np.empty(shape),
            "beta": np.empty(shape),
            "se": np.empty(shape),
            "n_obs": np.empty(shape, dtype=int),
        }
        for regime in (0, 1)
    }
    for h in range(horizon + 1):
        lhs, s, n_h = _usable(y, shock, h)
        _check_horizon_sample(n_h, h)
        d = dummy[1: y.shape[0] - h]
        n_post = int(d.sum())
        n_pre = n_h - n_post
        for regime, count in ((0, n_pre), (1, n_post)):
            if count < 3:
                raise DataError(
                    f"regime {regime} has too few usable observations "
                    f"at horizon {h} (n={count})"
                )
        x = np.column_stack([d, d * s, 1.0 - d, (1.0 - d) * s])
        coef, *_ = np.linalg.lstsq(x, lhs, rcond=None)
        resid = lhs - x @ coef
        cov = newey_west(x, resid, h + 1)
        results[1]["alpha"][h], results[1]["beta"][h] = coef[0], coef[1]
        results[0]["alpha"][h], results[0]["beta"][h] = coef[2], coef[3]
        results[1]["se"][h] = np.sqrt(cov[1, 1])
        results[0]["se"][h] = np.sqrt(cov[3, 3])
        results[1]["n_obs"][h] = n_post
        results[0]["n_obs"][h] = n_pre

    horizons = np.arange(horizon + 1)
    pre, post = (
        LocalProjectionResult(horizons=horizons.copy(), **results[regime])
        for regime in (0, 1)
    )
    return StateLpResult(pre=pre, post=post)


def lp_to_csv(result, path) -> None:
    """CSV with columns horizon, beta, se, n_obs, regime.

    Accepts a LocalProjectionResult (regime written as ``all``) or a
    StateLpResult (one block per regime).
    """
    blocks: list[tuple[str, LocalProjectionResult]]
    if isinstance(result, StateLpResult):
        blocks = [("pre", result.pre), ("post", result.post)]
    else:
        blocks = [("all", result)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("horizon,beta,se,n_obs,regime\n")
        for regime, block in blocks:
            for i, h in enumerate(block.horizons):
                fh.write(
                    f"{int(h)},{float(block.beta[i])!r},{float(block.se[i])!r},"
                    f"{int(block.n_obs[i])},{regime}\n"
                )


def lp_to_json(result, path, band_se: float = 1.0) -> None:
    def block(res: LocalProjectionResult) -> dict:
        return {
            "horizons": [int(h) for h in res.horizons],
            "alpha": [float(v) for v in res.alpha],
            "beta": [float(v) for v in res.beta],
            "se": [float(v) for v in res.se],
            "n_obs": [int(v) for v in res.n_obs],
        }

    if isinstance(result, StateLpResult):
        payload = {
            "regimes": {"pre": block(result.pre), "post": block(result.post)},
            "dummy": result.dummy_name,
        }
    else:
        payload = {"regimes": {"all": block(result)}}
    payload["band_se_multiple"] = band_se
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
