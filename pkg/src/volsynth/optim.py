"""Constrained smooth minimization.

Thin, contract-enforcing wrapper around sequential least squares programming
(scipy's SLSQP), shared by the autoencoder trainer and the GARCH-family
maximum-likelihood estimators.  Guarantees:

* the returned objective value never exceeds the objective at the start,
* converged results satisfy every inequality constraint within 1e-8,
* identical inputs produce bit-identical results.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .errors import NumericalError

FEASIBILITY_TOL = 1e-8

# value substituted for non-finite objective evaluations during the search;
# large enough to force backtracking, small enough not to overflow the QP
_BIG = 1e12


@dataclass
class OptimProblem:
    objective: Callable[[np.ndarray], float]
    x0: np.ndarray
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inequality_constraints: Sequence[Callable[[np.ndarray], float]] = field(default_factory=tuple)
    bounds: Optional[Sequence[tuple]] = None


@dataclass
class OptimResult:
    x_star: np.ndarray
    f_star: float
    iterations: int
    converged: bool
    max_constraint_violation: float


def finite_diff_gradient(f: Callable[[np.ndarray], float], x: np.ndarray,
                         h: float | None = None,
                         bounds: Optional[Sequence[tuple]] = None) -> np.ndarray:
    """Central-difference gradient: g_i = [f(x+h_i e_i) - f(x-h_i e_i)] / (2 h_i).

    With ``h=None`` the step is 1e-6 * max(1, |x_i|) per coordinate.  When
    ``bounds`` are given, evaluation points are clipped inside them and the
    divisor uses the actual spread, so the objective is never probed where
    it is undefined.
    """
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        hi = h if h is not None else 1e-6 * max(1.0, abs(x[i]))
        lo_i, hi_i = (None, None) if bounds is None else bounds[i]
        up = x[i] + hi if hi_i is None else min(x[i] + hi, hi_i)
        dn = x[i] - hi if lo_i is None else max(x[i] - hi, lo_i)
        if up <= dn:
            g[i] = 0.0
            continue
        xp = x.copy()
        xm = x.copy()
        xp[i] = up
        xm[i] = dn
        fp = f(xp)
        fm = f(xm)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericalError(f"non-finite objective while differencing coordinate {i}")
        g[i] = (fp - fm) / (up - dn)
    return g


def _violation(x: np.ndarray, problem: OptimProblem) -> float:
    v = 0.0
    for g in problem.inequality_constraints:
        v = max(v, -float(g(x)))
    if problem.bounds is not None:
        for xi, (lo, hi) in zip(x, problem.bounds):
            if lo is not None:
                v = max(v, lo - xi)
            if hi is not None:
                v = max(v, xi - hi)
    return max(v, 0.0)


def minimize(problem: OptimProblem, tol: float = 1e-9, max_iter: int = 500) -> OptimResult:
    """Minimize ``problem.objective`` subject to g_i(x) >= 0 and bounds.

    Non-finite evaluations away from x0 are replaced by a large finite value
    so the line search backtracks; the best feasible iterate seen is always
    retained and returned if the solver's final point is worse.
    """
    x0 = np.asarray(problem.x0, dtype=float)
    f0 = float(problem.objective(x0))
    if not np.isfinite(f0):
        raise NumericalError("objective is non-finite at the starting point")

    best = {"x": x0.copy(), "f": f0}

    def obj(x: np.ndarray) -> float:
        fx = float(problem.objective(x))
        if not np.isfinite(fx):
            return _BIG
        if fx < best["f"] and _violation(x, problem) <= FEASIBILITY_TOL:
            best["f"] = fx
            best["x"] = np.array(x, dtype=float)
        return fx

    if problem.gradient is not None:
        jac = problem.gradient
    else:
        def jac(x: np.ndarray) -> np.ndarray:
            def fsafe(y):
                fy = float(problem.objective(y))
                return fy if np.isfinite(fy) else _BIG
            return finite_diff_gradient(fsafe, x, bounds=problem.bounds)

    constraints = [{"type": "ineq", "fun": g} for g in problem.inequality_constraints]
    res = _scipy_minimize(
        obj, x0, jac=jac, bounds=problem.bounds, constraints=constraints,
        method="SLSQP", options={"maxiter": max_iter, "ftol": tol},
    )

    x_star = np.asarray(res.x, dtype=float)
    f_star = float(problem.objective(x_star))
    viol = _violation(x_star, problem)
    converged = bool(res.success) and viol <= FEASIBILITY_TOL and np.isfinite(f_star)
    # monotone acceptance: never return a point worse than the best feasible seen
    if not np.isfinite(f_star) or f_star > best["f"] or viol > FEASIBILITY_TOL:
        if best["f"] <= f_star or viol > FEASIBILITY_TOL or not np.isfinite(f_star):
            x_star = best["x"]
            f_star = best["f"]
            viol = _violation(x_star, problem)
            converged = converged and viol <= FEASIBILITY_TOL
    return OptimResult(
        x_star=x_star,
        f_star=f_star,
        iterations=int(res.nit),
        converged=converged,
        max_constraint_violation=viol,
    )
