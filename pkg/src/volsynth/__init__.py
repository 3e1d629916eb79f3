"""volsynth: synthetic realised measures and Realised GARCH forecasting.

Builds a single realised-volatility series from a panel of candidate
measures (first principal component, first independent component,
cross-sectional average, or a regularized autoencoder), embeds it in a
log-linear Realised GARCH model estimated by constrained maximum
likelihood, and compares models by rolling one-step-ahead predictive
log-likelihood.
"""
from . import autoenc, backtest, ingest, optim, simlab, synth, volmodel
from .errors import ConfigError, DataError, NumericalError, VolsynthError

__all__ = [
    "autoenc", "backtest", "ingest", "optim", "simlab", "synth", "volmodel",
    "ConfigError", "DataError", "NumericalError", "VolsynthError",
]

__version__ = "0.1.0"
