"""Constrained minimizer contract and finite-difference gradients."""
import numpy as np
import pytest

from volsynth import optim
from volsynth.errors import NumericalError


def test_unconstrained_quadratic():
    problem = optim.OptimProblem(objective=lambda x: (x[0] - 3.0) ** 2,
                                 x0=np.array([0.0]))
    res = optim.minimize(problem)
    assert abs(res.x_star[0] - 3.0) < 1e-6
    assert res.converged


def test_active_inequality_constraint():
    problem = optim.OptimProblem(objective=lambda x: x[0] ** 2,
                                 x0=np.array([2.0]),
                                 inequality_constraints=[lambda x: x[0] - 1.0])
    res = optim.minimize(problem)
    assert abs(res.x_star[0] - 1.0) < 1e-6
    assert res.max_constraint_violation <= 1e-8


def test_rosenbrock():
    def f(x):
        return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2

    res = optim.minimize(optim.OptimProblem(objective=f, x0=np.array([-1.2, 1.0])),
                         max_iter=2000)
    assert res.f_star < 1e-8


def test_monotone_acceptance_and_feasibility():
    rng = np.random.default_rng(3)
    for _ in range(5):
        A = rng.standard_normal((4, 4))
        Q = A @ A.T + np.eye(4)
        b = rng.standard_normal(4)
        x0 = np.full(4, 2.0)
        problem = optim.OptimProblem(
            objective=lambda x, Q=Q, b=b: 0.5 * x @ Q @ x + b @ x,
            x0=x0,
            inequality_constraints=[lambda x: x.sum() + 10.0])
        res = optim.minimize(problem)
        assert res.f_star <= problem.objective(x0)
        assert res.x_star.sum() + 10.0 >= -1e-8


def test_determinism_bit_identical():
    def f(x):
        return np.sin(x[0]) + x[0] ** 2 + np.exp(0.1 * x[1]) + x[1] ** 2

    runs = []
    for _ in range(2):
        res = optim.minimize(optim.OptimProblem(objective=f, x0=np.array([1.3, -0.7])))
        runs.append((res.x_star.tobytes(), res.f_star))
    assert runs[0] == runs[1]


def test_nonfinite_objective_at_start_is_error():
    problem = optim.OptimProblem(objective=lambda x: float("nan"), x0=np.array([0.0]))
    with pytest.raises(NumericalError):
        optim.minimize(problem)


def test_finite_diff_square():
    g = optim.finite_diff_gradient(lambda x: x[0] ** 2, np.array([3.0]), h=1e-5)
    assert abs(g[0] - 6.0) < 1e-8


def test_finite_diff_product():
    g = optim.finite_diff_gradient(lambda x: x[0] * x[1], np.array([2.0, 5.0]))
    assert np.allclose(g, [5.0, 2.0], atol=1e-7)


def test_finite_diff_respects_bounds():
    # f only defined on x >= 0; differencing must not step below the bound.
    def f(x):
        assert x[0] >= 0
        return np.sqrt(x[0] + 1.0)

    g = optim.finite_diff_gradient(f, np.array([0.0]), bounds=[(0.0, None)])
    assert abs(g[0] - 0.5) < 1e-5


def test_bounds_respected_by_minimizer():
    problem = optim.OptimProblem(objective=lambda x: (x[0] + 1.0) ** 2,
                                 x0=np.array([0.5]),
                                 bounds=[(0.0, 1.0)])
    res = optim.minimize(problem)
    assert abs(res.x_star[0]) < 1e-6
