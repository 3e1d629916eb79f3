"""Data-generating processes with known ground truth.

Simulates the log-linear Realised GARCH system and layers a D-column
measure panel on top of the canonical realised measure: column d is
loading_d * x_t * exp(noise_d * eta - noise_d^2 / 2) with eta standard
normal, so every column stays positive and is centred around
loading_d * x_t.  Powers every recovery and comparison test.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DataError
from .volmodel import RealGarchParams

BURN_IN = 500


@dataclass(frozen=True)
class DgpSpec:
    params: RealGarchParams
    T: int
    seed: int
    loadings: np.ndarray = field(default_factory=lambda: np.array([1.0]))
    noise_scales: np.ndarray = field(default_factory=lambda: np.array([0.0]))

    def __post_init__(self):
        if len(self.loadings) != len(self.noise_scales):
            raise DataError("loadings and noise_scales must have equal length")
        if np.any(np.asarray(self.loadings) <= 0) or np.any(np.asarray(self.noise_scales) < 0):
            raise DataError("loadings must be positive and noise scales nonnegative")
        if self.T < 2:
            raise DataError("T must be at least 2")

    @property
    def D(self) -> int:
        return len(self.loadings)


@dataclass(frozen=True)
class SimResult:
    returns: np.ndarray        # length T
    log_sigma2: np.ndarray     # true latent log-variance path
    measures: np.ndarray       # T x D panel
    x: np.ndarray              # canonical realised measure from the DGP
    close: np.ndarray          # price path consistent with the returns


def simulate(spec: DgpSpec) -> SimResult:
    """Run the DGP for BURN_IN + T steps and return the last T."""
    p = spec.params
    rng = np.random.default_rng(spec.seed)
    n = BURN_IN + spec.T
    z = rng.standard_normal(n)
    e = rng.standard_normal(n) * p.sigma_eps
    eta = rng.standard_normal((n, spec.D))

    pi = p.beta + p.gamma * p.phi
    mu = p.omega + p.gamma * p.xi
    h = np.empty(n)
    logx = np.empty(n)
    h[0] = mu / (1.0 - pi)   # unconditional mean of the AR(1) log-variance
    for t in range(n):
        logx[t] = p.xi + p.phi * h[t] + p.tau1 * z[t] + p.tau2 * (z[t] ** 2 - 1.0) + e[t]
        if t + 1 < n:
            h[t + 1] = p.omega + p.beta * h[t] + p.gamma * logx[t]

    r = np.exp(0.5 * h) * z
    x = np.exp(logx)
    loadings = np.asarray(spec.loadings, dtype=float)
    noise = np.asarray(spec.noise_scales, dtype=float)
    measures = loadings * x[:, None] * np.exp(noise * eta - 0.5 * noise ** 2)

    sl = slice(BURN_IN, n)
    returns = r[sl]
    close = 100.0 * np.exp(np.cumsum(returns) / 100.0)
    return SimResult(returns=returns, log_sigma2=h[sl], measures=measures[sl],
                     x=x[sl], close=close)


def to_frame(result: SimResult, measure_names: list[str] | None = None) -> pd.DataFrame:
    """Ingest-compatible frame: date, close and one column per measure.

    A leading row is prepended so that the return construction in
    ``ingest.load_panel`` reproduces the simulated returns.
    """
    T, D = result.measures.shape
    names = measure_names or [f"m{j + 1}" for j in range(D)]
    dates = pd.date_range("2000-01-03", periods=T + 1, freq="B").strftime("%Y-%m-%d")
    close = np.concatenate([[100.0], result.close])
    meas = np.vstack([result.measures[:1], result.measures])  # pad the dropped first row
    data = {"date": dates, "close": close}
    for j, name in enumerate(names):
        data[name] = meas[:, j]
    return pd.DataFrame(data)


def ground_truth_frame(result: SimResult) -> pd.DataFrame:
    T = len(result.returns)
    dates = pd.date_range("2000-01-03", periods=T + 1, freq="B").strftime("%Y-%m-%d")[1:]
    return pd.DataFrame({
        "date": dates,
        "return": result.returns,
        "log_sigma2_true": result.log_sigma2,
        "x_true": result.x,
    })
