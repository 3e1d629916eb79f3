"""GARCH, GARCH-X and log-linear Realised GARCH.

Latent-variance filtering, Gaussian likelihoods (constants omitted), and
constrained maximum-likelihood estimation.  The Realised GARCH recursion is

    log(sigma2_t) = omega + beta * log(sigma2_{t-1}) + gamma * log(x_{t-1}),
    log(x_t)      = xi + phi * log(sigma2_t) + tau1 * z_t
                    + tau2 * (z_t^2 - 1) + eps_t,

with stationarity requiring |beta + gamma*phi| < 1.  Both filters are linear
AR(1) recursions and are evaluated with scipy's lfilter for speed; results
are identical to the direct loop.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from . import optim
from .errors import DataError, NumericalError

STATIONARITY_MARGIN = 1e-6   # converts open stationarity intervals into closed sets
MIN_OBS = 50

MODEL_GARCH = "garch"
MODEL_GARCHX = "garchx"
MODEL_REALGARCH = "realgarch"


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.omega <= 0 or self.alpha < 0 or self.beta < 0:
            raise DataError("GARCH positivity conditions violated")
        if self.alpha + self.beta >= 1:
            raise DataError("GARCH stationarity requires alpha + beta < 1")

    def as_vector(self) -> np.ndarray:
        return np.array([self.omega, self.alpha, self.beta])


@dataclass(frozen=True)
class RealGarchParams:
    omega: float
    beta: float
    gamma: float
    xi: float
    phi: float
    tau1: float
    tau2: float
    sigma_eps: float

    def __post_init__(self):
        if self.sigma_eps <= 0:
            raise DataError("sigma_eps must be positive")
        if not -1.0 < self.beta + self.gamma * self.phi < 1.0:
            raise DataError("RealGARCH stationarity requires |beta + gamma*phi| < 1")

    def as_vector(self) -> np.ndarray:
        return np.array([self.omega, self.beta, self.gamma, self.xi, self.phi,
                         self.tau1, self.tau2, self.sigma_eps])

    @staticmethod
    def param_names() -> tuple[str, ...]:
        return ("omega", "beta", "gamma", "xi", "phi", "tau1", "tau2", "sigma_eps")


@dataclass(frozen=True)
class StationarityDiagnostics:
    persistence: float   # beta + gamma*phi (alpha + beta for GARCH)
    drift: float         # omega + gamma*xi (omega for GARCH)


@dataclass(frozen=True)
class FilterState:
    log_sigma2: np.ndarray
    z: np.ndarray
    eps: Optional[np.ndarray] = None   # measurement residuals, RealGARCH only

    @property
    def sigma2(self) -> np.ndarray:
        return np.exp(self.log_sigma2)


@dataclass(frozen=True)
class FitReport:
    model: str
    params: dict
    neg_loglik_returns: float
    neg_loglik_joint: Optional[float]
    persistence: float
    drift: float
    converged: bool
    iterations: int

    def to_json(self) -> str:
        return json.dumps({
            "model": self.model, "params": self.params,
            "neg_loglik_returns": self.neg_loglik_returns,
            "neg_loglik_joint": self.neg_loglik_joint,
            "persistence": self.persistence, "drift": self.drift,
            "converged": bool(self.converged), "iterations": int(self.iterations),
        }, indent=2)


def _ar1_path(first: float, intercept: np.ndarray, coef: float) -> np.ndarray:
    """y_1 = first; y_t = intercept_{t-1} + coef * y_{t-1} for t >= 2."""
    T = intercept.shape[0] + 1
    out = np.empty(T)
    out[0] = first
    if T > 1:
        out[1:], _ = lfilter([1.0], [1.0, -coef], intercept, zi=np.array([coef * first]))
    return out


def garch_filter(params: GarchParams, returns: np.ndarray,
                 x: Optional[np.ndarray] = None,
                 sigma2_init: Optional[float] = None) -> FilterState:
    """Variance recursion sigma2_t = omega + alpha*d_{t-1} + beta*sigma2_{t-1}.

    The driver d is squared returns (GARCH) or the exogenous series x
    (GARCH-X).  sigma2_1 defaults to the sample variance of the returns.
    """
    r = np.asarray(returns, dtype=float)
    d = r ** 2 if x is None else np.asarray(x, dtype=float)
    if x is not None:
        if d.shape != r.shape:
            raise DataError("exogenous series must match returns length")
        if np.any(d <= 0):
            raise DataError("exogenous series must be strictly positive")
    s0 = float(np.var(r, ddof=1)) if sigma2_init is None else float(sigma2_init)
    sigma2 = _ar1_path(s0, params.omega + params.alpha * d[:-1], params.beta)
    if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
        bad = int(np.argmax(~(np.isfinite(sigma2) & (sigma2 > 0))))
        raise NumericalError(f"non-positive or non-finite variance at index {bad}")
    z = r / np.sqrt(sigma2)
    return FilterState(log_sigma2=np.log(sigma2), z=z)


def realgarch_filter(params: RealGarchParams, returns: np.ndarray, x: np.ndarray,
                     log_sigma2_init: Optional[float] = None) -> FilterState:
    """Log-variance recursion plus measurement residuals.

    log(sigma2_1) defaults to the sample mean of log(x).
    """
    r = np.asarray(returns, dtype=float)
    lx = np.asarray(x, dtype=float)
    if np.any(lx <= 0):
        raise DataError("realised-measure series must be strictly positive")
    lx = np.log(lx)
    h0 = float(np.mean(lx)) if log_sigma2_init is None else float(log_sigma2_init)
    h = _ar1_path(h0, params.omega + params.gamma * lx[:-1], params.beta)
    if not np.all(np.isfinite(h)):
        bad = int(np.argmax(~np.isfinite(h)))
        raise NumericalError(f"non-finite log-variance at index {bad}")
    z = r * np.exp(-0.5 * h)
    eps = lx - params.xi - params.phi * h - params.tau1 * z - params.tau2 * (z ** 2 - 1.0)
    return FilterState(log_sigma2=h, z=z, eps=eps)


def loglik_returns(state: FilterState, returns: np.ndarray) -> float:
    """Returns part of the Gaussian log-likelihood, constants omitted:
    -sum[log(sigma2_t) + r_t^2 / sigma2_t]."""
    r = np.asarray(returns, dtype=float)
    return float(-np.sum(state.log_sigma2 + r ** 2 * np.exp(-state.log_sigma2)))


def loglik_joint(state: FilterState, returns: np.ndarray, x: np.ndarray,
                 sigma_eps: float) -> float:
    """Joint log-likelihood: returns part plus the measurement part
    -sum[log(sigma_eps^2) + eps_t^2 / sigma_eps^2]."""
    if sigma_eps <= 0:
        raise DataError("sigma_eps must be positive")
    if state.eps is None:
        raise DataError("joint likelihood needs a RealGARCH filter state")
    se2 = sigma_eps ** 2
    meas = float(-np.sum(np.log(se2) + state.eps ** 2 / se2))
    return loglik_returns(state, returns) + meas


DEFAULT_GARCH_START = (0.05, 0.05, 0.85)            # omega scaled by var(r)
DEFAULT_REALGARCH_START = (0.1, 0.6, 0.3, -0.3, 1.0, -0.1, 0.1, 0.5)


def _estimate_garch(returns, x, start, max_iter):
    r = np.asarray(returns, dtype=float)
    if start is None:
        theta0 = np.array([DEFAULT_GARCH_START[0] * np.var(r, ddof=1),
                           DEFAULT_GARCH_START[1], DEFAULT_GARCH_START[2]])
    else:
        theta0 = np.asarray(start, dtype=float)

    d = r ** 2 if x is None else x
    s0 = float(np.var(r, ddof=1))

    # smooth in a neighborhood of the feasible set so finite differences stay
    # well-behaved near the stationarity boundary; bounds/constraints own
    # feasibility
    def nll(theta):
        omega, alpha, beta = theta
        if omega <= 0 or alpha < 0 or beta < 0:
            return np.inf
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            sigma2 = _ar1_path(s0, omega + alpha * d[:-1], beta)
            if not np.all(np.isfinite(sigma2)) or np.any(sigma2 <= 0):
                return np.inf
            return float(np.sum(np.log(sigma2) + r ** 2 / sigma2))

    res = optim.minimize(optim.OptimProblem(
        objective=nll, x0=theta0,
        inequality_constraints=[lambda t: 1.0 - t[1] - t[2] - STATIONARITY_MARGIN],
        bounds=[(1e-8, None), (0.0, 1.0), (0.0, 1.0)],
    ), max_iter=max_iter)
    omega, alpha, beta = res.x_star
    params = GarchParams(omega=omega, alpha=alpha, beta=beta)
    diag = StationarityDiagnostics(persistence=alpha + beta, drift=omega)
    report = FitReport(
        model=MODEL_GARCH if x is None else MODEL_GARCHX,
        params={"omega": omega, "alpha": alpha, "beta": beta},
        neg_loglik_returns=res.f_star, neg_loglik_joint=None,
        persistence=diag.persistence, drift=diag.drift,
        converged=res.converged, iterations=res.iterations,
    )
    return params, diag, report


def _estimate_realgarch(returns, x, start, max_iter):
    r = np.asarray(returns, dtype=float)
    theta0 = (np.asarray(start, dtype=float) if start is not None
              else np.array(DEFAULT_REALGARCH_START))

    lx = np.log(np.asarray(x, dtype=float))
    h0 = float(np.mean(lx))

    def nll(theta):
        omega, beta, gamma, xi, phi, tau1, tau2, sigma_eps = theta
        if sigma_eps <= 0:
            return np.inf
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            h = _ar1_path(h0, omega + gamma * lx[:-1], beta)
            if not np.all(np.isfinite(h)):
                return np.inf
            z = r * np.exp(-0.5 * h)
            eps = lx - xi - phi * h - tau1 * z - tau2 * (z ** 2 - 1.0)
            se2 = sigma_eps ** 2
            val = (np.sum(h + z ** 2)
                   + np.sum(np.log(se2) + eps ** 2 / se2))
            return float(val) if np.isfinite(val) else np.inf

    res = optim.minimize(optim.OptimProblem(
        objective=nll, x0=theta0,
        inequality_constraints=[
            lambda t: 1.0 - (t[1] + t[2] * t[4]) - STATIONARITY_MARGIN,
            lambda t: (t[1] + t[2] * t[4]) + 1.0 - STATIONARITY_MARGIN,
        ],
        # |beta| < 1 is required on top of |pi| < 1: the in-sample filter is
        # an AR(1) in log-variance with coefficient beta driven by observed x,
        # so it diverges for |beta| >= 1 even when persistence is inside the
        # unit interval
        bounds=([(None, None)]
                + [(-1.0 + STATIONARITY_MARGIN, 1.0 - STATIONARITY_MARGIN)]
                + [(None, None)] * 5 + [(1e-6, None)]),
    ), max_iter=max_iter)
    params = RealGarchParams(*res.x_star)
    pi = params.beta + params.gamma * params.phi
    mu = params.omega + params.gamma * params.xi
    state = realgarch_filter(params, r, x)
    report = FitReport(
        model=MODEL_REALGARCH,
        params=dict(zip(RealGarchParams.param_names(), map(float, res.x_star))),
        neg_loglik_returns=-loglik_returns(state, r),
        neg_loglik_joint=res.f_star,
        persistence=pi, drift=mu,
        converged=res.converged, iterations=res.iterations,
    )
    return params, StationarityDiagnostics(persistence=pi, drift=mu), report


def estimate(model: str, returns: np.ndarray, x: Optional[np.ndarray] = None,
             start=None, max_iter: int = 500):
    """Constrained MLE.  Returns (params, StationarityDiagnostics, FitReport).

    ``model`` is one of "garch", "garchx", "realgarch"; GARCH-X and
    RealGARCH require the exogenous/realised series ``x``.  The fit report
    always carries the returns-only negative log-likelihood so models with
    different likelihood specifications remain comparable.
    """
    r = np.asarray(returns, dtype=float)
    if r.size < MIN_OBS:
        raise DataError(f"estimation needs at least {MIN_OBS} observations")
    if model in (MODEL_GARCHX, MODEL_REALGARCH) and x is None:
        raise DataError(f"model '{model}' requires a realised-measure series")
    if model == MODEL_GARCH:
        return _estimate_garch(r, None, start, max_iter)
    if model == MODEL_GARCHX:
        return _estimate_garch(r, np.asarray(x, dtype=float), start, max_iter)
    if model == MODEL_REALGARCH:
        return _estimate_realgarch(r, np.asarray(x, dtype=float), start, max_iter)
    raise DataError(f"unknown model '{model}'")


def forecast_one_step(model: str, params, state: FilterState,
                      r_last: float, x_last: Optional[float] = None) -> float:
    """Predicted variance for the day after the filtered sample.

    GARCH family: omega + alpha*d_T + beta*sigma2_T with d_T = r_T^2 or x_T.
    RealGARCH: exp(omega + beta*log(sigma2_T) + gamma*log(x_T)).
    """
    if model == MODEL_REALGARCH:
        if x_last is None or x_last <= 0:
            raise DataError("RealGARCH forecast needs a positive x_T")
        return float(np.exp(params.omega + params.beta * state.log_sigma2[-1]
                            + params.gamma * np.log(x_last)))
    d = r_last ** 2 if model == MODEL_GARCH else x_last
    if d is None:
        raise DataError("GARCH-X forecast needs x_T")
    return float(params.omega + params.alpha * d + params.beta * np.exp(state.log_sigma2[-1]))
