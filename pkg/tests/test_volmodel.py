"""GARCH / GARCH-X / RealGARCH filters, likelihoods, estimation, forecasts."""
import numpy as np
import pytest

from volsynth import simlab, volmodel
from volsynth.errors import DataError, NumericalError

from conftest import TRUE_REALGARCH


def simulate_garch(params, T, seed, burn=500):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(T + burn)
    sigma2 = params.omega / (1 - params.alpha - params.beta)
    r = np.empty(T + burn)
    for t in range(T + burn):
        r[t] = np.sqrt(sigma2) * z[t]
        sigma2 = params.omega + params.alpha * r[t] ** 2 + params.beta * sigma2
    return r[burn:]


def test_garch_filter_constant():
    params = volmodel.GarchParams(omega=0.1, alpha=0.0, beta=0.0)
    r = np.array([0.5, -0.2, 0.3, 0.1])
    state = volmodel.garch_filter(params, r, sigma2_init=0.1)
    assert np.allclose(np.exp(state.log_sigma2), 0.1)


def test_garch_unconditional_variance():
    params = volmodel.GarchParams(omega=0.0148, alpha=0.0949, beta=0.8932)
    uncond = params.omega / (1 - params.alpha - params.beta)
    assert uncond == pytest.approx(1.2437, abs=5e-4)
    # a filter driven by zero returns decays toward omega/(1-beta) instead;
    # with returns fixed at the unconditional sd it converges to uncond.
    r = np.full(4000, np.sqrt(uncond))
    state = volmodel.garch_filter(params, r, sigma2_init=2.0)
    assert np.exp(state.log_sigma2[-1]) == pytest.approx(uncond, rel=1e-6)


def test_garchx_nested_identity_is_bit_exact():
    params = volmodel.GarchParams(omega=0.05, alpha=0.1, beta=0.85)
    r = simulate_garch(params, 500, seed=1)
    plain = volmodel.garch_filter(params, r)
    nested = volmodel.garch_filter(params, r, x=r**2)
    assert plain.log_sigma2.tobytes() == nested.log_sigma2.tobytes()
    assert volmodel.loglik_returns(plain, r) == volmodel.loglik_returns(nested, r)


def test_realgarch_passthrough():
    params = volmodel.RealGarchParams(omega=0.0, beta=0.0, gamma=1.0, xi=0.0,
                                      phi=0.5, tau1=0.0, tau2=0.0, sigma_eps=0.5)
    r = np.array([0.1, -0.2, 0.3, 0.4])
    x = np.array([1.5, 2.5, 0.8, 1.2])
    state = volmodel.realgarch_filter(params, r, x)
    assert np.allclose(np.exp(state.log_sigma2[1:]), x[:-1], atol=1e-12)


def test_persistence_hand_value():
    params = volmodel.RealGarchParams(omega=0.1, beta=0.5718, gamma=0.3712,
                                      xi=0.0, phi=1.0760, tau1=0.0, tau2=0.0,
                                      sigma_eps=0.5)
    diag = volmodel.StationarityDiagnostics(
        persistence=params.beta + params.gamma * params.phi,
        drift=params.omega + params.gamma * params.xi)
    assert diag.persistence == pytest.approx(0.9712, abs=5e-4)
    assert abs(diag.persistence) < 1


def test_nonstationary_params_rejected():
    with pytest.raises((ValueError, DataError, NumericalError)):
        volmodel.GarchParams(omega=0.1, alpha=0.6, beta=0.5)
    with pytest.raises((ValueError, DataError, NumericalError)):
        volmodel.RealGarchParams(omega=0.1, beta=0.9, gamma=0.5, xi=0.0,
                                 phi=1.0, tau1=0.0, tau2=0.0, sigma_eps=0.5)


def test_leverage_asymmetry_in_residuals():
    # tau1=-0.1, tau2=0, xi=0, phi=0, sigma^2=1: eps(r=-1) - eps(r=+1) = +0.2
    params = volmodel.RealGarchParams(omega=0.0, beta=0.0, gamma=0.1, xi=0.0,
                                      phi=0.0, tau1=-0.1, tau2=0.0, sigma_eps=1.0)
    x = np.ones(2)
    eps_neg = volmodel.realgarch_filter(params, np.array([-1.0, -1.0]), x,
                                        log_sigma2_init=0.0).eps[0]
    eps_pos = volmodel.realgarch_filter(params, np.array([1.0, 1.0]), x,
                                        log_sigma2_init=0.0).eps[0]
    # fitted log-measure level = log x - eps; negative returns raise it by 0.2
    fitted_neg = np.log(x[0]) - eps_neg
    fitted_pos = np.log(x[0]) - eps_pos
    assert fitted_neg - fitted_pos == pytest.approx(0.2, abs=1e-12)


def test_loglik_returns_hand_values():
    def single(sigma2, r):
        state = volmodel.FilterState(log_sigma2=np.array([np.log(sigma2)]),
                                     z=np.array([r / np.sqrt(sigma2)]))
        return volmodel.loglik_returns(state, np.array([r]))

    assert single(1.0, 0.0) == pytest.approx(0.0)
    assert single(1.0, 2.0) == pytest.approx(-4.0)
    assert single(4.0, 2.0) == pytest.approx(-(np.log(4) + 1))


def test_loglik_joint_hand_values():
    state = volmodel.FilterState(log_sigma2=np.array([0.0]), z=np.array([2.0]),
                                 eps=np.array([0.0]))
    assert volmodel.loglik_joint(state, np.array([2.0]), np.array([1.0]), 1.0) \
        == pytest.approx(-4.0)
    state2 = volmodel.FilterState(log_sigma2=np.array([0.0]), z=np.array([0.0]),
                                  eps=np.array([1.0]))
    assert volmodel.loglik_joint(state2, np.array([0.0]), np.array([1.0]), 1.0) \
        == pytest.approx(-1.0)


def test_loglik_joint_matches_slow_summation():
    rng = np.random.default_rng(17)
    r = rng.standard_normal(40)
    x = rng.lognormal(size=40)
    params = volmodel.RealGarchParams(omega=0.1, beta=0.6, gamma=0.3, xi=-0.3,
                                      phi=1.0, tau1=-0.1, tau2=0.1, sigma_eps=0.5)
    state = volmodel.realgarch_filter(params, r, x)
    sig2 = np.exp(state.log_sigma2)
    direct = -np.sum(np.log(sig2) + r**2 / sig2) \
        - np.sum(np.log(params.sigma_eps**2) + state.eps**2 / params.sigma_eps**2)
    assert volmodel.loglik_joint(state, r, x, params.sigma_eps) \
        == pytest.approx(direct, abs=1e-12)


def test_ar1_reduction_identity():
    params = TRUE_REALGARCH
    rng = np.random.default_rng(23)
    r = rng.standard_normal(200)
    x = rng.lognormal(size=200)
    state = volmodel.realgarch_filter(params, r, x)
    h = state.log_sigma2
    pi = params.beta + params.gamma * params.phi
    mu = params.omega + params.gamma * params.xi
    lev = params.tau1 * state.z + params.tau2 * (state.z**2 - 1)
    rhs = mu + pi * h[:-1] + params.gamma * (lev[:-1] + state.eps[:-1])
    assert np.max(np.abs(h[1:] - rhs)) < 1e-10


def test_forecast_examples():
    rg = volmodel.RealGarchParams(omega=0.0, beta=0.0, gamma=1.0, xi=0.0,
                                  phi=0.5, tau1=0.0, tau2=0.0, sigma_eps=0.5)
    state = volmodel.FilterState(log_sigma2=np.array([0.0]), z=np.array([0.0]),
                                 eps=np.array([0.0]))
    assert volmodel.forecast_one_step("realgarch", rg, state, r_last=0.1, x_last=2.5) \
        == pytest.approx(2.5)
    g = volmodel.GarchParams(omega=0.1, alpha=0.0, beta=0.5)
    state_g = volmodel.FilterState(log_sigma2=np.array([np.log(2.0)]),
                                   z=np.array([0.0]))
    assert volmodel.forecast_one_step("garch", g, state_g, r_last=1.0) \
        == pytest.approx(1.1)


def test_forecast_matches_filter_extension():
    params = volmodel.GarchParams(omega=0.05, alpha=0.1, beta=0.85)
    r = simulate_garch(params, 300, seed=4)
    state = volmodel.garch_filter(params, r[:-1])
    fc = volmodel.forecast_one_step("garch", params, state, r_last=r[-2])
    full = volmodel.garch_filter(params, r)
    assert fc == pytest.approx(np.exp(full.log_sigma2[-1]), rel=1e-12)

    rg = TRUE_REALGARCH
    spec = simlab.DgpSpec(params=rg, T=300, seed=5, loadings=np.ones(1),
                          noise_scales=np.array([0.3]))
    sim = simlab.simulate(spec)
    x = sim.x
    state = volmodel.realgarch_filter(rg, sim.returns[:-1], x[:-1])
    fc = volmodel.forecast_one_step("realgarch", rg, state,
                                    r_last=sim.returns[-2], x_last=x[-2])
    full = volmodel.realgarch_filter(rg, sim.returns, x)
    assert fc == pytest.approx(np.exp(full.log_sigma2[-1]), rel=1e-12)


def test_estimate_improves_and_respects_constraints():
    params = volmodel.GarchParams(omega=0.05, alpha=0.1, beta=0.85)
    r = simulate_garch(params, 2000, seed=6)
    est, diag, report = volmodel.estimate("garch", r)
    assert est.alpha + est.beta < 1
    start = volmodel.GarchParams(omega=0.05 * r.var(ddof=1), alpha=0.05, beta=0.85)
    start_state = volmodel.garch_filter(start, r)
    assert report.neg_loglik_returns <= -volmodel.loglik_returns(start_state, r) + 1e-9


def test_estimate_garchx_matches_garch():
    params = volmodel.GarchParams(omega=0.05, alpha=0.1, beta=0.85)
    r = simulate_garch(params, 3000, seed=7)
    g, _, _ = volmodel.estimate("garch", r)
    gx, _, _ = volmodel.estimate("garchx", r, x=r**2)
    assert abs(g.omega - gx.omega) < 1e-4
    assert abs(g.alpha - gx.alpha) < 1e-4
    assert abs(g.beta - gx.beta) < 1e-4


def test_estimate_requires_enough_data():
    with pytest.raises(DataError):
        volmodel.estimate("garch", np.random.default_rng(0).standard_normal(20))


def test_leverage_sign_recovered():
    hits = 0
    for seed in range(20):
        spec = simlab.DgpSpec(params=TRUE_REALGARCH, T=1500, seed=seed,
                              loadings=np.ones(1), noise_scales=np.array([0.3]))
        sim = simlab.simulate(spec)
        est, _, _ = volmodel.estimate("realgarch", sim.returns, x=sim.x)
        hits += est.tau1 < 0
    assert hits >= 18


def test_fit_report_json_round_trip():
    params = volmodel.GarchParams(omega=0.05, alpha=0.1, beta=0.85)
    r = simulate_garch(params, 500, seed=9)
    _, _, report = volmodel.estimate("garch", r)
    import json
    blob = json.loads(report.to_json())
    assert blob["model"] == "garch"
    assert set(blob["params"]) == {"omega", "alpha", "beta"}
    assert "persistence" in blob and "converged" in blob
