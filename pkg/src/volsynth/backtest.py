"""Rolling one-step-ahead forecasting across models and synthesis methods.

For every out-of-sample day the estimation window (fixed width) slides
forward by one day, the synthetic measure is regenerated from in-window data
only, the model is re-estimated (warm-started from the previous window) and
the next day's variance is forecast and scored by its predictive
log-likelihood contribution -[log(s2) + r^2/s2].
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from . import autoenc, synth, volmodel
from .autoenc import AeHyperparams
from .errors import ConfigError, DataError, NumericalError, VolsynthError
from .ingest import MeasurePanel

# combo id -> (model, synthesis method, display name)
COMBOS = {
    "garch": (volmodel.MODEL_GARCH, None, "GARCH"),
    "garchx": (volmodel.MODEL_GARCHX, "rv", "GARCH-X"),
    "rv-rg": (volmodel.MODEL_REALGARCH, "rv", "RV-RG"),
    "pc-rg": (volmodel.MODEL_REALGARCH, "pc", "PC-RG"),
    "ic-rg": (volmodel.MODEL_REALGARCH, "ic", "IC-RG"),
    "avg-rg": (volmodel.MODEL_REALGARCH, "avg", "AVG-RG"),
    "ae-rg": (volmodel.MODEL_REALGARCH, "ae", "AE-RG"),
}

RECORD_COLUMNS = ["date", "model", "sigma2_hat", "return", "contribution", "degenerate"]


@dataclass(frozen=True)
class RollingConfig:
    t_in: int
    t_out: int
    combos: tuple[str, ...] = ("garch", "rv-rg", "avg-rg")
    refit_interval: int = 1
    ae_hyper: AeHyperparams = field(default_factory=AeHyperparams)
    base_seed: int = 0
    demean_mode: str = "window"    # "window" (no look-ahead) or "full" (replication)
    rv_column: int = 0
    max_opt_iter: int = 300

    def __post_init__(self):
        if self.t_in < 100:
            raise ConfigError("t_in must be at least 100")
        if self.t_out < 1 or self.refit_interval < 1:
            raise ConfigError("t_out and refit_interval must be positive")
        unknown = [c for c in self.combos if c not in COMBOS]
        if unknown:
            raise ConfigError(f"unknown model combos: {unknown}")
        if self.demean_mode not in ("window", "full"):
            raise ConfigError("demean_mode must be 'window' or 'full'")


@dataclass(frozen=True)
class ForecastRecord:
    date: str
    model_id: str
    sigma2_hat: float
    realized_return: float
    contribution: float
    params: dict
    degenerate: bool = False
    fallback: bool = False


@dataclass(frozen=True)
class ComparisonTable:
    totals: dict          # display name -> total negative predictive log-likelihood
    t_in: int
    t_out: int
    best_model: str
    failures: dict        # display name -> count of fallback windows

    def to_frame(self) -> pd.DataFrame:
        rows = [{"model": m, "neg_pred_loglik": v,
                 "best": m == self.best_model, "failures": self.failures.get(m, 0)}
                for m, v in self.totals.items()]
        df = pd.DataFrame(rows)
        df["t_in"] = self.t_in
        df["t_out"] = self.t_out
        return df

    def to_json(self) -> str:
        return json.dumps({
            "totals": self.totals, "t_in": self.t_in, "t_out": self.t_out,
            "best_model": self.best_model, "failures": self.failures,
        }, indent=2)


def _window_returns(panel: MeasurePanel, a: int, b: int, mode: str) -> tuple[np.ndarray, float]:
    """In-window de-meaned returns plus the mean subtracted (raw scale)."""
    if mode == "full":
        return panel.returns[a:b], panel.return_mean
    raw = panel.raw_returns[a:b]
    m = float(np.mean(raw))
    return raw - m, m


def _window_x(panel: MeasurePanel, a: int, b: int, method: Optional[str],
              config: RollingConfig, window_index: int, ae_state: list):
    """Regenerate the driving series from in-window data only.

    Returns (x series or None, degenerate flag).  ``ae_state`` is a
    single-element list carrying the previous window's encoder parameters so
    successive trainings start from the last solution instead of re-rolling
    the initialization; only past-window data flows through it.
    """
    if method is None:
        return None, False
    if method == "rv":
        return panel.measures[a:b, config.rv_column], False
    if method == "ae":
        # warm-start from the previous window's encoder, and re-run the whole
        # training with fresh seeds before accepting a degenerate code
        for rerun in range(_AE_WINDOW_RERUNS):
            seed = config.base_seed + window_index + rerun * 100_003
            init = ae_state[0] if rerun == 0 else None
            params, series, report = autoenc.train(
                panel.measures[a:b], replace(config.ae_hyper, seed=seed),
                init=init)
            if not report.degenerate:
                break
        if not report.degenerate:
            ae_state[0] = params
        return series.values, report.degenerate
    series = synth.synthetic_measure(panel.measures[a:b], method,
                                     seed=config.base_seed + window_index)
    return series.values, False


def _one_step(model: str, params, r_win: np.ndarray,
              x_win: Optional[np.ndarray]) -> float:
    """Filter the estimation window and return the next-day variance forecast."""
    with np.errstate(over="ignore"):
        if model == volmodel.MODEL_REALGARCH:
            state = volmodel.realgarch_filter(params, r_win, x_win)
            return volmodel.forecast_one_step(model, params, state,
                                              r_win[-1], x_win[-1])
        state = volmodel.garch_filter(params, r_win,
                                      x_win if model == volmodel.MODEL_GARCHX else None)
        return volmodel.forecast_one_step(
            model, params, state, r_win[-1],
            x_win[-1] if x_win is not None else None)


_BOUNDARY_TOL = 1e-3
_AE_WINDOW_RERUNS = 6


def _boundary_fit(model: str, params) -> bool:
    """True when the fit sits on the edge of its stability region."""
    if model == volmodel.MODEL_REALGARCH:
        return abs(params.beta) >= 1.0 - _BOUNDARY_TOL
    return params.alpha + params.beta >= 1.0 - _BOUNDARY_TOL


def _fit_objective(report) -> float:
    if report.neg_loglik_joint is not None:
        return report.neg_loglik_joint
    return report.neg_loglik_returns


def _run_combo(panel: MeasurePanel, config: RollingConfig, combo: str) -> list[ForecastRecord]:
    model, method, display = COMBOS[combo]
    records: list[ForecastRecord] = []
    prev_params = None
    prev_vector = None
    ae_state = [None]
    for i in range(config.t_out):
        a, b = i, i + config.t_in
        r_win, mean_win = _window_returns(panel, a, b, config.demean_mode)
        degenerate = False
        fallback = False
        x_win = None
        try:
            x_win, degenerate = _window_x(panel, a, b, method, config, i, ae_state)
            if i % config.refit_interval == 0 or prev_params is None:
                params, _, rep = volmodel.estimate(model, r_win, x_win,
                                                   start=prev_vector,
                                                   max_iter=config.max_opt_iter)
                if prev_vector is not None and _boundary_fit(model, params):
                    # a warm start can trap the optimizer in a near-unit-root
                    # basin; a cold restart usually escapes it, so keep
                    # whichever fit attains the lower objective
                    cold, _, cold_rep = volmodel.estimate(
                        model, r_win, x_win, max_iter=config.max_opt_iter)
                    if _fit_objective(cold_rep) < _fit_objective(rep):
                        params = cold
            else:
                params = prev_params
        except VolsynthError:
            if prev_params is None:
                raise
            params = prev_params
            fallback = True
            if method is not None and x_win is None:
                # synthetic series failed too; fall back to the rv column
                x_win = panel.measures[a:b, config.rv_column]

        s2_hat = _one_step(model, params, r_win, x_win)
        if not np.isfinite(s2_hat) or s2_hat <= 0:
            # the fit passed its constraints but the filter still diverged on
            # this window's series; retry with the previous good parameters
            # and the raw measure column
            if prev_params is None or fallback:
                raise NumericalError(
                    f"non-finite forecast at window {i} ({display})")
            params = prev_params
            fallback = True
            if method is not None:
                x_win = panel.measures[a:b, config.rv_column]
            s2_hat = _one_step(model, params, r_win, x_win)
            if not np.isfinite(s2_hat) or s2_hat <= 0:
                raise NumericalError(
                    f"non-finite forecast at window {i} ({display})")
        prev_params = params
        prev_vector = params.as_vector()

        r_next = float(panel.raw_returns[b] - mean_win)
        if config.demean_mode == "full":
            r_next = float(panel.returns[b])
        contribution = -(np.log(s2_hat) + r_next ** 2 / s2_hat)
        if not np.isfinite(contribution):
            raise NumericalError(f"non-finite forecast contribution at window {i} ({display})")
        records.append(ForecastRecord(
            date=str(panel.dates[b]), model_id=display, sigma2_hat=float(s2_hat),
            realized_return=r_next, contribution=float(contribution),
            params={k: float(v) for k, v in params.__dict__.items()},
            degenerate=degenerate, fallback=fallback,
        ))
    return records


def run_rolling(panel: MeasurePanel, config: RollingConfig,
                threads: int = 1) -> tuple[list[ForecastRecord], ComparisonTable]:
    """Rolling backtest over every configured model/method combo.

    Windows for one combo run sequentially (warm starts); distinct combos can
    run in parallel processes.  Output ordering is deterministic regardless
    of completion order.
    """
    if panel.n_rows < config.t_in + config.t_out:
        raise DataError(f"panel has {panel.n_rows} rows; need >= t_in + t_out = "
                        f"{config.t_in + config.t_out}")
    if threads > 1 and len(config.combos) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(config.combos))) as pool:
            futures = [pool.submit(_run_combo, panel, config, c) for c in config.combos]
            per_combo = [f.result() for f in futures]
    else:
        per_combo = [_run_combo(panel, config, c) for c in config.combos]

    records = [rec for combo_records in per_combo for rec in combo_records]
    totals = {}
    failures = {}
    for combo, combo_records in zip(config.combos, per_combo):
        display = COMBOS[combo][2]
        totals[display] = -float(sum(r.contribution for r in combo_records))
        failures[display] = sum(r.fallback for r in combo_records)
    best = min(totals, key=totals.get)
    table = ComparisonTable(totals=totals, t_in=config.t_in, t_out=config.t_out,
                            best_model=best, failures=failures)
    return records, table


def records_frame(records: list[ForecastRecord]) -> pd.DataFrame:
    return pd.DataFrame([{
        "date": r.date, "model": r.model_id, "sigma2_hat": r.sigma2_hat,
        "return": r.realized_return, "contribution": r.contribution,
        "degenerate": r.degenerate,
    } for r in records], columns=RECORD_COLUMNS)


def parameter_paths(records: list[ForecastRecord]) -> dict[str, pd.DataFrame]:
    """Per-model time series of the per-window parameter estimates."""
    if not records:
        raise DataError("parameter_paths needs at least one record")
    paths: dict[str, pd.DataFrame] = {}
    for model in dict.fromkeys(r.model_id for r in records):
        rows = [dict(date=r.date, **r.params) for r in records if r.model_id == model]
        paths[model] = pd.DataFrame(rows).set_index("date")
    return paths


@dataclass(frozen=True)
class AuditProbe:
    forecast_day: str
    perturbed_row: int
    forecast_before: float
    forecast_after: float

    @property
    def passed(self) -> bool:
        return self.forecast_before == self.forecast_after


@dataclass(frozen=True)
class AuditReport:
    probes: list[AuditProbe]
    passed: bool


def _perturb_panel(panel: MeasurePanel, row: int, rng: np.random.Generator) -> MeasurePanel:
    """Alter the raw return and one measure entry at ``row``; re-de-mean globally."""
    raw = panel.raw_returns.copy()
    raw[row] += 1.0 + rng.uniform(0.0, 1.0)
    mu = float(np.mean(raw))
    measures = panel.measures.copy()
    j = int(rng.integers(panel.n_measures))
    measures[row, j] *= 1.0 + rng.uniform(0.1, 0.5)
    return replace(panel, returns=raw - mu, return_mean=mu, measures=measures,
                   raw_returns=raw)


def no_lookahead_audit(panel: MeasurePanel, config: RollingConfig,
                       n_probes: int = 5, seed: int = 1234) -> AuditReport:
    """Verify day-t forecasts are bit-invariant to data strictly after day t.

    Requires ``demean_mode='window'``; the full-sample de-meaning mode leaks
    future information by construction.  Raises on any violation.
    """
    if config.demean_mode != "window":
        raise ConfigError("no_lookahead_audit requires demean_mode='window'")
    base_records, _ = run_rolling(panel, config)
    by_combo_day = {(r.model_id, r.date): r.sigma2_hat for r in base_records}

    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(n_probes):
        w = int(rng.integers(config.t_out))          # probed forecast window
        target_row = w + config.t_in                 # forecast day index in the panel
        if target_row + 1 >= panel.n_rows:
            w = 0
            target_row = config.t_in
        perturb_row = int(rng.integers(target_row + 1, panel.n_rows))
        perturbed = _perturb_panel(panel, perturb_row, rng)
        sub_config = replace(config, t_out=w + 1)
        new_records, _ = run_rolling(perturbed, sub_config)
        for rec in new_records:
            if rec.date != str(panel.dates[target_row]):
                continue
            before = by_combo_day[(rec.model_id, rec.date)]
            probe = AuditProbe(forecast_day=rec.date, perturbed_row=perturb_row,
                               forecast_before=before, forecast_after=rec.sigma2_hat)
            probes.append(probe)
            if not probe.passed:
                raise NumericalError(
                    f"look-ahead leak: {rec.model_id} forecast for {rec.date} changed "
                    f"after perturbing row {perturb_row}")
    return AuditReport(probes=probes, passed=True)
