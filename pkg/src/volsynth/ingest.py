"""Panel ingestion: prices to de-meaned percentage log returns, aligned measures.

Canonical input is one CSV per market with a date column, a closing-price
column and one or more strictly positive realised-measure columns (variance
scale).  Rows with missing or non-positive measures are dropped, mirroring
the removal of non-trading days.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["mean", "std_dev", "median", "min", "max", "skewness", "excess_kurtosis"]

# float format that round-trips IEEE doubles exactly through text
FLOAT_FMT = "%.17g"


@dataclass(frozen=True)
class MeasurePanel:
    """Aligned daily returns and realised-measure matrix.

    ``returns`` are de-meaned percentage log returns; ``return_mean`` is the
    mean that was subtracted.  ``raw_returns`` carries the pre-de-meaning
    values verbatim so that window-local de-meaning in rolling mode never
    depends on the full-sample mean (reconstructing them as
    ``returns + return_mean`` would differ at the last bit).
    """
    dates: np.ndarray          # object array of date strings, strictly increasing
    close: np.ndarray          # positive closing prices, length T
    returns: np.ndarray        # de-meaned percentage log returns, length T
    measures: np.ndarray       # T x D, strictly positive
    measure_names: tuple[str, ...]
    return_mean: float = 0.0
    raw_returns: np.ndarray = None

    def __post_init__(self):
        if self.raw_returns is None:
            object.__setattr__(self, "raw_returns", self.returns + self.return_mean)
        T = len(self.dates)
        if not (len(self.close) == len(self.returns) == self.measures.shape[0] == T):
            raise DataError("panel fields have inconsistent lengths")
        if len(self.raw_returns) != T:
            raise DataError("panel fields have inconsistent lengths")
        if np.any(self.measures <= 0):
            raise DataError("panel measures must be strictly positive")
        if np.any(self.dates[:-1] >= self.dates[1:]):
            raise DataError("panel dates must be strictly increasing")

    @property
    def n_rows(self) -> int:
        return len(self.dates)

    @property
    def n_measures(self) -> int:
        return self.measures.shape[1]


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_dev: float
    median: float
    min: float
    max: float
    skewness: float
    excess_kurtosis: float

    def as_row(self) -> list[float]:
        return [self.mean, self.std_dev, self.median, self.min, self.max,
                self.skewness, self.excess_kurtosis]


def demean(series: np.ndarray) -> tuple[np.ndarray, float]:
    """Subtract the sample mean; returns (centred series, subtracted mean)."""
    m = float(np.mean(series))
    return series - m, m


def log_returns(close: np.ndarray) -> np.ndarray:
    """Percentage log returns r_t = [log C_t - log C_{t-1}] * 100 (length n-1)."""
    close = np.asarray(close, dtype=float)
    return np.diff(np.log(close)) * 100.0


def load_panel(path, column_map: Optional[dict] = None, demean_returns: bool = True) -> MeasurePanel:
    """Load the canonical CSV into a MeasurePanel.

    ``column_map`` keys: ``date``, ``close``, ``measures`` (list of column
    names).  Defaults: columns named "date"/"close", every remaining numeric
    column treated as a measure.  Rows with any missing or non-positive
    measure are dropped (count logged); the first surviving row is then
    dropped because it has no prior close for a return.

    A ``return`` column, if present, is trusted verbatim (it is what
    ``write_panel(include_returns=True)`` emits) instead of being recomputed
    from closes, which makes the write/load round trip bit-exact.
    """
    column_map = column_map or {}
    df = pd.read_csv(path, float_precision="round_trip")
    date_col = column_map.get("date", "date")
    close_col = column_map.get("close", "close")
    for col in (date_col, close_col):
        if col not in df.columns:
            raise ConfigError(f"required column '{col}' not found in {path}")
    measure_cols = list(column_map.get("measures") or
                        [c for c in df.columns if c not in (date_col, close_col, "return")])
    if not measure_cols:
        raise ConfigError(f"no measure columns found in {path}")
    missing = [c for c in measure_cols if c not in df.columns]
    if missing:
        raise ConfigError(f"measure columns {missing} not found in {path}")

    df = df.sort_values(date_col, kind="stable").reset_index(drop=True)
    meas = df[measure_cols].apply(pd.to_numeric, errors="coerce")
    close = pd.to_numeric(df[close_col], errors="coerce")
    good = close.notna() & (close > 0) & meas.notna().all(axis=1) & (meas > 0).all(axis=1)
    n_dropped = int((~good).sum())
    if n_dropped:
        log.info("dropped %d rows with missing or non-positive entries", n_dropped)
    df = df[good].reset_index(drop=True)

    if len(df) < 3:
        raise DataError(f"only {len(df)} usable rows in {path}; need at least 3")

    close_v = df[close_col].to_numpy(dtype=float)
    if "return" in df.columns and "return" not in measure_cols:
        returns = pd.to_numeric(df["return"]).to_numpy(dtype=float)
        mu = 0.0
        return MeasurePanel(
            dates=df[date_col].astype(str).to_numpy(),
            close=close_v,
            returns=returns,
            measures=df[measure_cols].to_numpy(dtype=float),
            measure_names=tuple(measure_cols),
            return_mean=mu,
        )
    raw = log_returns(close_v)
    if demean_returns:
        returns, mu = demean(raw)
    else:
        returns, mu = raw, 0.0
    return MeasurePanel(
        dates=df[date_col].astype(str).to_numpy()[1:],
        close=close_v[1:],
        returns=returns,
        measures=df[measure_cols].to_numpy(dtype=float)[1:, :],
        measure_names=tuple(measure_cols),
        return_mean=mu,
        raw_returns=raw,
    )


def write_panel(panel: MeasurePanel, path, include_returns: bool = False) -> None:
    """Write a panel in the canonical CSV format (bit-exact float round trip)."""
    data = {"date": panel.dates, "close": panel.close}
    if include_returns:
        data["return"] = panel.returns
    for j, name in enumerate(panel.measure_names):
        data[name] = panel.measures[:, j]
    pd.DataFrame(data).to_csv(path, index=False, float_format=FLOAT_FMT)


def summarize(series: np.ndarray) -> SummaryStats:
    """Moment summary with the sample (n-1) variance convention.

    Skewness and excess kurtosis use population central moments; both are
    defined as 0 for a constant series so reports never contain NaNs.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        raise DataError("summarize needs at least 2 observations")
    m = float(np.mean(x))
    c = x - m
    m2 = float(np.mean(c ** 2))
    if m2 == 0.0:
        skew, exkurt = 0.0, 0.0
    else:
        skew = float(np.mean(c ** 3)) / m2 ** 1.5
        exkurt = float(np.mean(c ** 4)) / m2 ** 2 - 3.0
    return SummaryStats(
        mean=m,
        std_dev=float(np.std(x, ddof=1)),
        median=float(np.median(x)),
        min=float(np.min(x)),
        max=float(np.max(x)),
        skewness=skew,
        excess_kurtosis=exkurt,
    )


def split(panel: MeasurePanel, in_fraction: float | None = None,
          split_date: str | None = None) -> tuple[MeasurePanel, MeasurePanel]:
    """Split a panel into disjoint, exhaustive in/out parts in temporal order.

    Exactly one of ``in_fraction`` (first part gets floor(f*T) rows) or
    ``split_date`` (first part gets all rows with date <= split_date) applies.
    """
    T = panel.n_rows
    if split_date is not None:
        k = int(np.sum(panel.dates <= str(split_date)))
    elif in_fraction is not None:
        if not 0.0 < in_fraction < 1.0:
            raise ConfigError("in_fraction must lie in (0, 1)")
        k = math.floor(in_fraction * T)
    else:
        raise ConfigError("split needs in_fraction or split_date")
    if k < 2 or T - k < 2:
        raise ConfigError(f"split at {k}/{T} leaves a part with fewer than 2 rows")
    return _slice(panel, 0, k), _slice(panel, k, T)


def _slice(panel: MeasurePanel, a: int, b: int) -> MeasurePanel:
    return replace(
        panel,
        dates=panel.dates[a:b],
        close=panel.close[a:b],
        returns=panel.returns[a:b],
        measures=panel.measures[a:b, :],
        raw_returns=panel.raw_returns[a:b],
    )


def summary_table(panel: MeasurePanel) -> pd.DataFrame:
    """Stats for returns plus each log-transformed measure, one row per series."""
    rows = {"returns": summarize(panel.returns).as_row()}
    for j, name in enumerate(panel.measure_names):
        rows[f"log({name})"] = summarize(np.log(panel.measures[:, j])).as_row()
    return pd.DataFrame.from_dict(rows, orient="index", columns=SUMMARY_COLUMNS)
