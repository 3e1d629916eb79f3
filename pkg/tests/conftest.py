"""Shared fixtures for the volsynth test suite."""
from __future__ import annotations

import io
import time

import numpy as np
import pytest

from volsynth import backtest, ingest, simlab, volmodel

# In-sample RealGARCH parameter set used as simulation ground truth throughout.
TRUE_REALGARCH = volmodel.RealGarchParams(
    omega=0.1536, beta=0.5982, gamma=0.3566, xi=-0.4475,
    phi=1.0487, tau1=-0.1010, tau2=0.1165, sigma_eps=0.5374,
)

# Calmer RealGARCH truth for the rolling comparisons.  Under the Table-3-level
# parameter set the measure columns are so heavy-tailed that, after per-column
# [0,1] normalization, a one-neuron reconstruction gains nothing from tracking
# the common factor (the ridge cost of un-saturating the encoder exceeds any
# MSE reduction), leaving the code direction unidentified.  This set keeps the
# same model structure with a lower volatility-of-volatility so the encoder's
# objective identifies the factor.
MILD_REALGARCH = volmodel.RealGarchParams(
    omega=0.02, beta=0.70, gamma=0.25, xi=-0.1,
    phi=1.0, tau1=-0.05, tau2=0.05, sigma_eps=0.25,
)

# Six-column panel layout for the rolling comparisons: five moderately noisy
# columns plus one distinctly noisier final column.
NOISE_SCALES = np.array([0.3, 0.4, 0.5, 0.6, 0.7, 0.9])
MILD_NOISE_SCALES = np.array([0.15, 0.2, 0.25, 0.3, 0.35, 0.5])
NOISY_COLUMN = 5


def simulated_panel(T: int, seed: int, noise_scales: np.ndarray = NOISE_SCALES,
                    params: volmodel.RealGarchParams = TRUE_REALGARCH,
                    ) -> tuple[ingest.MeasurePanel, simlab.SimResult]:
    """Simulate a returns + 6-measure panel and round it through the CSV loader."""
    spec = simlab.DgpSpec(params=params, T=T, seed=seed,
                          loadings=np.ones(len(noise_scales)),
                          noise_scales=np.asarray(noise_scales, dtype=float))
    result = simlab.simulate(spec)
    buf = io.StringIO()
    simlab.to_frame(result).to_csv(buf, index=False)
    buf.seek(0)
    return ingest.load_panel(buf), result


@pytest.fixture(scope="session")
def rolling_comparison():
    """One 20-seed rolling comparison shared by the predictive-ordering,
    PC/IC-proximity and parameter-path tests.

    Each seed: fresh simulated panel, T_in=1000 / T_out=200, five
    RealGARCH variants (noisy single column, PC, IC, AVG, AE).
    """
    combos = ("rv-rg", "pc-rg", "ic-rg", "avg-rg", "ae-rg")
    runs = []
    t0 = time.time()
    for seed in range(20):
        panel, _ = simulated_panel(T=1300, seed=seed,
                                   noise_scales=MILD_NOISE_SCALES,
                                   params=MILD_REALGARCH)
        config = backtest.RollingConfig(t_in=1000, t_out=200, combos=combos,
                                        base_seed=seed, rv_column=NOISY_COLUMN)
        records, table = backtest.run_rolling(panel, config)
        runs.append((records, table))
    return {"runs": runs, "elapsed": time.time() - t0, "combos": combos}
