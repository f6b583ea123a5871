"""Cholesky identification, impulse responses, and residual decomposition.

Identification is by ordering only: the impact matrix is the lower-triangular
Cholesky factor of the innovation covariance, so variable i does not respond
on impact to shocks ordered after it. The decomposition splits a target
residual series into the component spanned by a reference residual (the
projection, with no intercept because VAR residuals are mean zero by
construction) and the orthogonal remainder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bvar import PosteriorDraw, VarSpec, companion
from .errors import NumericalError

BAND_PERCENTILES = (16.0, 50.0, 84.0)


@dataclass
class ImpactMatrix:
    """Lower-triangular impact matrix L with positive diagonal, L L' = Sigma."""

    L: np.ndarray


@dataclass
class IrfSet:
    """Posterior array of impulse responses with pointwise percentile bands.

    ``responses`` has shape (draws, H+1, variables, shocks); the summary
    arrays hold the 16/50/84 percentiles across draws, the central 68%
    interval used as one-standard-deviation coverage bands.
    """

    responses: np.ndarray
    horizons: np.ndarray
    variables: list[str]
    shocks: list[str]
    lower: np.ndarray
    median: np.ndarray
    upper: np.ndarray
    scale_note: str = "responses to one-standard-deviation structural shocks"


@dataclass
class ShockDecomposition:
    """Orthogonal split of a target residual into the component common with a
    reference residual and the idiosyncratic remainder."""

    gamma: float
    common: np.ndarray
    idiosyncratic: np.ndarray
    r2: float


def cholesky_rotate(sigma: np.ndarray) -> ImpactMatrix:
    """Unique lower-triangular factor of an SPD covariance matrix.

    Near-semidefinite input is an error, never jittered: silent
    regularization would break the L L' reconstruction contract.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"covariance must be square, got shape {sigma.shape}")
    asym = float(np.max(np.abs(sigma - sigma.T))) if sigma.size else 0.0
    if asym > 1e-10:
        raise NumericalError(f"covariance not symmetric (max asymmetry {asym:.3e})")
    try:
        lower = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        smallest = float(np.linalg.eigvalsh(0.5 * (sigma + sigma.T))[0])
        raise NumericalError(
            f"covariance not positive definite (smallest eigenvalue {smallest:.3e})"
        ) from None
    return ImpactMatrix(L=lower)


def irf_from_factors(
    b: np.ndarray, impact: np.ndarray, spec: VarSpec, horizon: int
) -> np.ndarray:
    """Companion-power impulse responses for given coefficients and impact
    matrix: response[h] = (top-left n x n block of companion^h) @ impact."""
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    impact = np.asarray(impact, dtype=float)
    n = impact.shape[0]
    comp = companion(b, spec)
    power = np.eye(comp.shape[0])
    out = np.empty((horizon + 1, n, n))
    for h in range(horizon + 1):
        out[h] = power[:n, :n] @ impact
        if h < horizon:
            power = comp @ power
    return out


def compute_irf(draw: PosteriorDraw, spec: VarSpec, horizon: int) -> np.ndarray:
    """(H+1, n, n) responses of each variable to each one-standard-deviation
    Cholesky shock, identified in the ordering of ``spec``."""
    return irf_from_factors(draw.B, cholesky_rotate(draw.Sigma).L, spec, horizon)


def irf_bands(draws: list[PosteriorDraw], spec: VarSpec, horizon: int) -> IrfSet:
    """Pointwise 16/50/84 percentile bands of the draw-wise responses."""
    if len(draws) < 2:
        raise ValueError(f"need at least 2 draws for bands, got {len(draws)}")
    responses = np.stack([compute_irf(d, spec, horizon) for d in draws])
    lower, median, upper = np.percentile(responses, BAND_PERCENTILES, axis=0)
    return IrfSet(
        responses=responses,
        horizons=np.arange(horizon + 1),
        variables=list(spec.order),
        shocks=list(spec.order),
        lower=lower,
        median=median,
        upper=upper,
    )


def rescale_irf(
    irfs: IrfSet,
    shock: int,
    target_variable: str,
    target_h: int,
    target_value: float,
) -> IrfSet:
    """Multiply every response to one shock (all draws, variables, horizons)
    by the single factor that puts the median response of the target variable
    at the target horizon exactly on the target value."""
    if target_variable not in irfs.variables:
        raise ValueError(f"unknown variable {target_variable!r}")
    var_idx = irfs.variables.index(target_variable)
    if not 0 <= shock < len(irfs.shocks):
        raise ValueError(f"shock index {shock} out of range")
    if not 0 <= target_h < irfs.horizons.shape[0]:
        raise ValueError(f"target horizon {target_h} outside 0..{irfs.horizons[-1]}")
    current = irfs.median[target_h, var_idx, shock]
    if current == 0.0:
        raise NumericalError(
            f"median response of {target_variable} to shock {irfs.shocks[shock]} "
            f"at h={target_h} is zero; rescaling undefined"
        )
    factor = float(target_value / current)
    responses = irfs.responses.copy()
    responses[:, :, :, shock] *= factor
    lower = irfs.lower.copy()
    median = irfs.median.copy()
    upper = irfs.upper.copy()
    lower[:, :, shock], median[:, :, shock], upper[:, :, shock] = np.percentile(
        responses[:, :, :, shock], BAND_PERCENTILES, axis=0
    )
    note = (
        f"{irfs.scale_note}; shock {irfs.shocks[shock]} rescaled by {factor!r} so the "
        f"median response of {target_variable} at h={target_h} equals {target_value}"
    )
    return IrfSet(
        responses=responses,
        horizons=irfs.horizons.copy(),
        variables=list(irfs.variables),
        shocks=list(irfs.shocks),
        lower=lower,
        median=median,
        upper=upper,
        scale_note=note,
    )


def decompose_residuals(reference: np.ndarray, target: np.ndarray) -> ShockDecomposition:
    """Project ``target`` on ``reference`` (no intercept) and split it into
    the fitted common component and the orthogonal idiosyncratic remainder.

    r2 is the share of the target's (uncentered) sum of squares explained by
    the common component.
    """
    reference = np.asarray(reference, dtype=float).ravel()
    target = np.asarray(target, dtype=float).ravel()
    if reference.shape[0] != target.shape[0]:
        raise ValueError(
            f"length mismatch: {reference.shape[0]} vs {target.shape[0]}"
        )
    if reference.shape[0] < 3:
        raise ValueError("need at least 3 observations")
    if np.var(reference) == 0.0:
        raise NumericalError("reference residual series has zero variance")
    gamma = float(reference @ target / (reference @ reference))
    common = gamma * reference
    idiosyncratic = target - common
    ss_target = float(target @ target)
    if ss_target > 0.0:
        r2 = 1.0 - float(idiosyncratic @ idiosyncratic) / ss_target
    else:
        r2 = 1.0
    return ShockDecomposition(
        gamma=gamma,
        common=common,
        idiosyncratic=idiosyncratic,
        r2=min(max(r2, 0.0), 1.0),
    )


def standardize_shock(series: np.ndarray) -> np.ndarray:
    """Scale a series to unit sample standard deviation (MLE denominator);
    the mean is left untouched."""
    series = np.asarray(series, dtype=float).ravel()
    sd = float(np.std(series))
    if sd == 0.0:
        raise NumericalError("cannot standardize a constant series")
    return series / sd


def irf_to_csv(irfs: IrfSet, path) -> None:
    """Long-format summary: shock, variable, horizon, lower, median, upper."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("shock,variable,horizon,lower,median,upper\n")
        for j, shock in enumerate(irfs.shocks):
            for i, variable in enumerate(irfs.variables):
                for h in irfs.horizons:
                    fh.write(
                        f"{shock},{variable},{int(h)},"
                        f"{float(irfs.lower[h, i, j])!r},{float(irfs.median[h, i, j])!r},"
                        f"{float(irfs.upper[h, i, j])!r}\n"
                    )


def irf_to_json(irfs: IrfSet, path) -> None:
    payload = {
        "variables": irfs.variables,
        "shocks": irfs.shocks,
        "horizons": [int(h) for h in irfs.horizons],
        "scale_note": irfs.scale_note,
        "lower": irfs.lower.tolist(),
        "median": irfs.median.tolist(),
        "upper": irfs.upper.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def decomposition_to_csv(
    dec: ShockDecomposition,
    dates: list[str],
    reference: np.ndarray,
    target: np.ndarray,
    path,
    reference_name: str = "reference",
    target_name: str = "target",
) -> None:
    if not (len(dates) == reference.shape[0] == target.shape[0] == dec.common.shape[0]):
        raise ValueError("dates and series lengths disagree")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"date,resid_{reference_name},resid_{target_name},common,idiosyncratic\n")
        for i, date in enumerate(dates):
            fh.write(
                f"{date},{float(reference[i])!r},{float(target[i])!r},"
                f"{float(dec.common[i])!r},{float(dec.idiosyncratic[i])!r}\n"
            )
