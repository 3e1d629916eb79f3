"""Estimating GARCH, GARCH-X, and the log-linear Realised GARCH by MLE.

Simulates returns and a realised measure from known parameters, fits all
three model families on the same data, and prints estimates next to the
truth, plus the stationarity diagnostics each fit reports.

Run:  python demos/03_fit_realised_garch.py
"""
import numpy as np

from volsynth import simlab, volmodel

truth = volmodel.RealGarchParams(omega=0.1536, beta=0.5982, gamma=0.3566,
                                 xi=-0.4475, phi=1.0487, tau1=-0.1010,
                                 tau2=0.1165, sigma_eps=0.5374)
spec = simlab.DgpSpec(params=truth, T=3000, seed=11,
                      loadings=np.ones(1), noise_scales=np.zeros(1))
sim = simlab.simulate(spec)
r, x = sim.returns, sim.x

print("Realised GARCH (returns + realised measure):")
est, diag, report = volmodel.estimate("realgarch", r, x=x)
for name in ("omega", "beta", "gamma", "xi", "phi", "tau1", "tau2", "sigma_eps"):
    print(f"  {name:>9}  true {getattr(truth, name):8.4f}   est {getattr(est, name):8.4f}")
print(f"  persistence pi = {diag.persistence:.4f} (true "
      f"{truth.beta + truth.gamma * truth.phi:.4f}), stationary: "
      f"{abs(diag.persistence) < 1}")
print(f"  converged in {report.iterations} iterations, "
      f"joint negative loglik {report.neg_loglik_joint:.2f}")

print("\nGARCH(1,1) on squared returns vs GARCH-X on the realised measure:")
g, gd, _ = volmodel.estimate("garch", r)
gx, gxd, _ = volmodel.estimate("garchx", r, x=x)
print(f"  GARCH   omega {g.omega:.4f}  alpha {g.alpha:.4f}  beta {g.beta:.4f}  "
      f"persistence {gd.persistence:.4f}")
print(f"  GARCH-X omega {gx.omega:.4f}  alpha {gx.alpha:.4f}  beta {gx.beta:.4f}  "
      f"persistence {gxd.persistence:.4f}")

# the one-step-ahead variance forecast from the end of the sample
state = volmodel.realgarch_filter(est, r, x)
fc = volmodel.forecast_one_step("realgarch", est, state, r[-1], x_last=x[-1])
print(f"\none-step-ahead variance forecast: {fc:.4f} "
      f"(last true in-sample variance {np.exp(sim.log_sigma2[-1]):.4f})")
