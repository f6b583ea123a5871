"""Patent-based innovation indices from grant events and firm returns.

Each granted patent is valued by filtering the firm's stock return over the
grant announcement window: the patent's return contribution v has a normal
prior truncated to v >= 0 and the observed window return is v plus normal
noise, so the filtered value is the market cap times the posterior mean of v.
Values are then summed by quarter, split by the green flag, to form the two
indices. Window returns arrive as data; estimating them from raw prices is
out of scope.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DataError, NumericalError
from .panel import format_quarter, parse_quarter, quarter_range


@dataclass
class PatentEvent:
    """One patent grant with the announcement-window return of the granted
    firm; ``value`` is filled by the filter."""

    grant_date: dt.date
    firm_id: str
    green: bool
    window_return: float
    market_cap: float
    sigma_e: float | None = None
    value: float | None = None


@dataclass
class InnovationIndex:
    """Quarterly sums of filtered patent values, split green / non-green."""

    dates: list[str]
    gpbii: np.ndarray
    ngpbii: np.ndarray


@dataclass
class IndexStats:
    level_correlation: float
    growth_correlation: float
    ratio: np.ndarray


def _mills_ratio(z: float) -> float:
    # phi(z)/Phi(z), stable for arbitrarily negative z via erfcx.
    return math.sqrt(2.0 / math.pi) / special.erfcx(-z / math.sqrt(2.0))


def filter_value(
    window_return: float, sigma_v: float, sigma_e: float, market_cap: float
) -> float:
    """Dollar value of one patent grant given the window return.

    With a N(0, sigma_v^2) prior on the return contribution truncated to
    v >= 0 and N(0, sigma_e^2) observation noise, the posterior of v given
    return r is N(delta*r, s^2) truncated at zero with delta =
    sigma_v^2/(sigma_v^2+sigma_e^2) and s = sqrt(delta)*sigma_e, whose mean
    is delta*r + s*phi(delta*r/s)/Phi(delta*r/s). The result is strictly
    positive and increasing in the return.
    """
    if sigma_v <= 0 or sigma_e <= 0:
        raise ValueError("sigma_v and sigma_e must be > 0")
    if market_cap <= 0:
        raise ValueError("market_cap must be > 0")
    delta = sigma_v**2 / (sigma_v**2 + sigma_e**2)
    s = math.sqrt(delta) * sigma_e
    mean = delta * window_return
    return market_cap * (mean + s * _mills_ratio(mean / s))


def assign_values(
    events: list[PatentEvent], sigma_v: float, default_sigma_e: float
) -> list[PatentEvent]:
    """Fill event values with the filter.

    Patents granted to the same firm on the same day share one window
    reaction, which cannot be attributed patent by patent; the filtered
    value is split equally across them.
    """
    groups: dict[tuple[str, dt.date], list[PatentEvent]] = {}
    for event in events:
        groups.setdefault((event.firm_id, event.grant_date), []).append(event)
    out = []
    for (firm, day), members in groups.items():
        first = members[0]
        for other in members[1:]:
            if (
                other.window_return != first.window_return
                or other.market_cap != first.market_cap
                or other.sigma_e != first.sigma_e
            ):
                raise DataError(
                    f"inconsistent window data for firm {firm} on {day}: "
                    "same-day events must share return, cap, and noise scale"
                )
        sigma_e = first.sigma_e if first.sigma_e is not None else default_sigma_e
        total = filter_value(first.window_return, sigma_v, sigma_e, first.market_cap)
        share = total / len(members)
        for event in members:
            out.append(
                PatentEvent(
                    grant_date=event.grant_date,
                    firm_id=event.firm_id,
                    green=event.green,
                    window_return=event.window_return,
                    market_cap=event.market_cap,
                    sigma_e=event.sigma_e,
                    value=share,
                )
            )
    out.sort(key=lambda e: (e.grant_date, e.firm_id))
    return out


def quarter_of(day: dt.date) -> str:
    return format_quarter(day.year * 4 + (day.month - 1) // 3)


def build_index(events: list[PatentEvent], start: str, end: str) -> InnovationIndex:
    """Quarterly sums of event values by green flag over the full calendar
    from start to end; quarters with no events are exactly zero."""
    dates = quarter_range(start, end)
    lo, hi = parse_quarter(start), parse_quarter(end)
    buckets: dict[tuple[int, bool], list[float]] = {}
    for event in sorted(events, key=lambda e: (e.grant_date, e.firm_id)):
        if event.value is None:
            raise DataError(
                f"event for {event.firm_id} on {event.grant_date} has no value; "
                "run assign_values first"
            )
        if event.value < 0:
            raise DataError(
                f"negative value {event.value} for {event.firm_id} on {event.grant_date}"
            )
        serial = parse_quarter(quarter_of(event.grant_date))
        if serial < lo or serial > hi:
            raise DataError(
                f"event on {event.grant_date} outside index range {start}..{end}"
            )
        buckets.setdefault((serial, event.green), []).append(event.value)
    gpbii = np.zeros(len(dates))
    ngpbii = np.zeros(len(dates))
    for (serial, green), values in buckets.items():
        total = math.fsum(values)
        if green:
            gpbii[serial - lo] = total
        else:
            ngpbii[serial - lo] = total
    return InnovationIndex(dates=dates, gpbii=gpbii, ngpbii=ngpbii)


def index_stats(idx: InnovationIndex) -> IndexStats:
    """Level and log-growth correlations of the two indices plus their
    elementwise ratio."""
    g, ng = idx.gpbii, idx.ngpbii
    if g.shape[0] < 3:
        raise DataError("need at least 3 quarters for index statistics")
    if np.any(ng == 0.0):
        quarter = idx.dates[int(np.nonzero(ng == 0.0)[0][0])]
        raise DataError(f"zero non-green index value in {quarter}; ratio undefined")
    if np.var(g) == 0.0 or np.var(ng) == 0.0:
        raise NumericalError("zero-variance index series; correlation undefined")
    level = float(np.corrcoef(g, ng)[0, 1])
    if np.any(g <= 0.0):
        quarter = idx.dates[int(np.nonzero(g <= 0.0)[0][0])]
        raise DataError(
            f"non-positive green index value in {quarter}; growth rate undefined"
        )
    dg, dng = np.diff(np.log(g)), np.diff(np.log(ng))
    if np.var(dg) == 0.0 or np.var(dng) == 0.0:
        raise NumericalError("zero-variance growth series; correlation undefined")
    growth = float(np.corrcoef(dg, dng)[0, 1])
    return IndexStats(
        level_correlation=level, growth_correlation=growth, ratio=g / ng
    )


def load_events(path) -> list[PatentEvent]:
    """Read events from CSV with columns grant_date (ISO), firm_id,
    green (0/1), window_return, market_cap, and optional sigma_e."""
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read events file {path}: {exc}") from exc
    events = []
    with fh:
        reader = csv.DictReader(fh)
        required = {"grant_date", "firm_id", "green", "window_return", "market_cap"}
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise DataError(f"events file missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                day = dt.date.fromisoformat(row["grant_date"].strip())
            except ValueError:
                raise DataError(
                    f"row {lineno}: bad grant_date {row['grant_date']!r}"
                ) from None
            green_raw = row["green"].strip()
            if green_raw not in ("0", "1"):
                raise DataError(f"row {lineno}: green flag must be 0 or 1")
            try:
                ret = float(row["window_return"])
                cap = float(row["market_cap"])
                sigma_e = float(row["sigma_e"]) if row.get("sigma_e") else None
            except ValueError:
                raise DataError(f"row {lineno}: non-numeric cell") from None
            if cap <= 0:
                raise DataError(f"row {lineno}: market_cap must be > 0")
            events.append(
                PatentEvent(
                    grant_date=day,
                    firm_id=row["firm_id"].strip(),
                    green=green_raw == "1",
                    window_return=ret,
                    market_cap=cap,
                    sigma_e=sigma_e,
                )
            )
    return events


def write_index(idx: InnovationIndex, path, date_column: str = "date") -> None:
    """Index CSV in the panel loader's format: date column plus gpbii and
    ngpbii, so the output feeds straight into the VAR pipeline."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{date_column},gpbii,ngpbii\n")
        for i, date in enumerate(idx.dates):
            fh.write(f"{date},{float(idx.gpbii[i])!r},{float(idx.ngpbii[i])!r}\n")
