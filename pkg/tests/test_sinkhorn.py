import numpy as np
import pytest
from correspondence.models import Correspondence, DualPotentials, OdInstance
from correspondence.solver import (beta_sweep, dual_value,
                                   entropy_price_slopes, gravity_eval,
                                   mean_trip_time, primal_dual_report,
                                   project_to_polytope, solve_cloud,
                                   solve_sinkhorn)
from django.core.exceptions import ValidationError
from scipy.optimize import brentq, minimize


def two_by_two_oracle(inst: OdInstance) -> np.ndarray:
    """Решение 2 x 2 через одну переменную t = d[0, 0]."""
    (l1, _), (w1, _) = inst.shares()
    T, beta = inst.T, inst.beta
    price = beta * (T[0, 0] - T[0, 1] - T[1, 0] + T[1, 1])

    def derivative(t):
        return (
            np.log(t) - np.log(l1 - t) - np.log(w1 - t)
            + np.log(1 - l1 - w1 + t) + price
        )

    low, high = max(0.0, l1 + w1 - 1), min(l1, w1)
    t = brentq(derivative, low + 1e-15, high - 1e-15, xtol=1e-15)
    return np.array([[t, l1 - t], [w1 - t, 1 - l1 - w1 + t]])


def convex_oracle(inst: OdInstance) -> np.ndarray:
    l, w = inst.shares()
    n = inst.n
    cost = inst.beta * inst.T.reshape(-1)
    constraints = [
        {'type': 'eq', 'fun': lambda d, i=i: d.reshape(n, n)[i].sum() - l[i]}
        for i in range(n)
    ] + [
        {'type': 'eq',
         'fun': lambda d, j=j: d.reshape(n, n)[:, j].sum() - w[j]}
        for j in range(n - 1)
    ]
    result = minimize(
        lambda d: float(d @ np.log(d) + cost @ d),
        np.outer(l, w).reshape(-1),
        jac=lambda d: np.log(d) + 1 + cost,
        bounds=[(1e-12, 1.0)] * (n * n),
        constraints=constraints,
        method='SLSQP',
        options={'ftol': 1e-15, 'maxiter': 1000},
    )
    return result.x.reshape(n, n)


@pytest.mark.sinkhorn
def test_golden_two_by_two(golden_instance):
    solution = solve_sinkhorn(golden_instance)
    assert solution.converged
    assert np.allclose(
        solution.d_star.d, two_by_two_oracle(golden_instance), atol=1e-9
    )


@pytest.mark.sinkhorn
def test_reference_two_by_two(reference_instance):
    solution = solve_sinkhorn(reference_instance)
    assert solution.converged
    assert np.allclose(
        solution.d_star.d, two_by_two_oracle(reference_instance), atol=1e-6
    )
    assert abs(solution.dual_gap) <= 1e-8


@pytest.mark.sinkhorn
@pytest.mark.parametrize('seed', range(20))
def test_random_two_by_two_matches_oracle(random_instance, seed):
    inst = random_instance(100 + seed, n=2)
    solution = solve_sinkhorn(inst)
    assert np.allclose(
        solution.d_star.d, two_by_two_oracle(inst), atol=1e-6
    )


@pytest.mark.sinkhorn
def test_constant_costs_give_outer_product():
    inst = OdInstance(
        L=[0.6, 0.4], W=[0.5, 0.5], T=np.full((2, 2), 7.0), beta=3.0,
    )
    assert np.allclose(
        solve_sinkhorn(inst).d_star.d, [[0.3, 0.3], [0.2, 0.2]], atol=1e-12
    )


@pytest.mark.sinkhorn
def test_three_by_three_matches_convex_solver():
    inst = OdInstance(
        L=[0.2, 0.3, 0.5],
        W=[0.4, 0.4, 0.2],
        T=[[0, 1, 2], [1, 0, 1], [2, 1, 0]],
        beta=1.5,
    )
    solution = solve_sinkhorn(inst)
    assert np.allclose(solution.d_star.d, convex_oracle(inst), atol=1e-5)


@pytest.mark.sinkhorn
@pytest.mark.parametrize('seed', range(50))
def test_random_instances(random_instance, seed):
    inst = random_instance(seed)
    solution = solve_sinkhorn(inst)
    l, w = inst.shares()
    d = solution.d_star.d

    assert solution.converged
    assert solution.max_violation <= 1e-10
    assert np.abs(d.sum(axis=1) - l).max() <= 1e-10
    assert np.abs(d.sum(axis=0) - w).max() <= 1e-10
    assert d.min() > 0
    assert abs(solution.dual_gap) <= 1e-8
    # ln d + beta T + lam_l - lam_w = 0 во всех клетках
    stationarity = (
        np.log(d) + inst.beta * inst.T
        + solution.potentials.lam_l[:, None]
        - solution.potentials.lam_w[None, :]
    )
    assert np.abs(stationarity).max() <= 1e-9
    assert solution.potentials.lam_l[0] == 0.0


@pytest.mark.sinkhorn
def test_zero_beta_is_outer_product(random_instance):
    inst = random_instance(42).with_beta(0.0)
    l, w = inst.shares()
    solution = solve_sinkhorn(inst)
    assert np.allclose(solution.d_star.d, np.outer(l, w), atol=1e-12)


@pytest.mark.sinkhorn
def test_single_district():
    inst = OdInstance(L=[5], W=[5], T=[[2.0]], beta=1.0)
    assert solve_sinkhorn(inst).d_star.d.tolist() == [[1.0]]


@pytest.mark.sinkhorn
def test_degenerate_margin():
    inst = OdInstance(L=[0, 2], W=[1, 1], T=np.ones((2, 2)), beta=1.0)
    with pytest.raises(ValidationError) as exc:
        solve_sinkhorn(inst)
    assert exc.value.code == 'DEGENERATE_MARGIN'


@pytest.mark.sinkhorn
def test_not_converged_returns_best(random_instance):
    inst = random_instance(3, n=6)
    solution = solve_sinkhorn(inst, tol=1e-14, max_iter=1)
    assert not solution.converged
    assert solution.iterations == 1
    assert np.isfinite(solution.max_violation)


@pytest.mark.sinkhorn
def test_primal_dual(golden_instance):
    solution = solve_sinkhorn(golden_instance)
    report = primal_dual_report(solution, golden_instance)
    assert report.primal == pytest.approx(solution.primal_value)
    assert report.lagrangian == pytest.approx(report.primal, abs=1e-9)
    assert abs(report.dual_gap) <= 1e-8
    moved = DualPotentials(
        solution.potentials.lam_l + [0.0, 0.1],
        solution.potentials.lam_w - [0.05, 0.0],
    )
    assert dual_value(moved, golden_instance) < report.dual


@pytest.mark.sinkhorn
def test_gravity_shift_invariant(golden_instance):
    potentials = solve_sinkhorn(golden_instance).potentials
    base = gravity_eval(potentials, golden_instance).d
    shifted = gravity_eval(potentials.shifted(3.7), golden_instance).d
    assert np.allclose(base, shifted, rtol=1e-12, atol=0)


@pytest.mark.sinkhorn
def test_gravity_overflow(golden_instance):
    potentials = DualPotentials([-1000.0, 0.0], [0.0, 0.0])
    with pytest.raises(ValidationError) as exc:
        gravity_eval(potentials, golden_instance)
    assert exc.value.code == 'OVERFLOW'


@pytest.mark.sinkhorn
def test_gravity_eval_closed_form(reference_instance):
    inst = reference_instance.with_beta(0.0)
    zero = DualPotentials([0.0, 0.0], [0.0, 0.0])
    assert gravity_eval(zero, inst).d.tolist() == [[1.0, 1.0], [1.0, 1.0]]
    potentials = DualPotentials([np.log(2.0), 0.0], [0.0, 0.0])
    assert np.allclose(
        gravity_eval(potentials, inst).d, [[0.5, 0.5], [1.0, 1.0]],
        rtol=1e-12, atol=0,
    )


@pytest.mark.sinkhorn
def test_mean_trip_time_decreases(golden_instance):
    rows = beta_sweep(golden_instance, [0.0, 0.5, 1.0, 2.0, 4.0])
    times = [row.mean_trip_time for row in rows]
    entropies = [row.entropy for row in rows]
    assert all(later < earlier for earlier, later in zip(times, times[1:]))
    assert all(
        later < earlier for earlier, later in zip(entropies, entropies[1:])
    )
    solution = solve_sinkhorn(golden_instance.with_beta(1.0))
    assert times[2] == pytest.approx(
        mean_trip_time(solution.d_star, golden_instance.T)
    )


@pytest.mark.sinkhorn
def test_entropy_price_slope(golden_instance):
    (middle, slope), = entropy_price_slopes(golden_instance, [1.0, 1.001])
    assert middle == pytest.approx(1.0005)
    assert slope == pytest.approx(1.0005, abs=1e-3)


@pytest.mark.sinkhorn
@pytest.mark.parametrize('seed', range(20))
def test_mean_trip_time_monotone_random(random_instance, seed):
    rows = beta_sweep(random_instance(200 + seed), [0.0, 0.5, 1.0, 2.0, 5.0])
    times = [row.mean_trip_time for row in rows]
    assert all(
        later <= earlier + 1e-9 for earlier, later in zip(times, times[1:])
    )


@pytest.mark.sinkhorn
def test_entropy_price_slope_constant_costs():
    inst = OdInstance(
        L=[0.6, 0.4], W=[0.5, 0.5], T=np.full((2, 2), 7.0), beta=1.0,
    )
    with pytest.raises(ValidationError) as exc:
        entropy_price_slopes(inst, [1.0, 2.0])
    assert exc.value.code == 'INVALID_RANGE'


@pytest.mark.sinkhorn
def test_cloud_with_equilibrium_potentials(golden_instance):
    solution = solve_sinkhorn(golden_instance)
    cloud = solve_cloud(
        golden_instance, solution.potentials.scaled(1 / golden_instance.beta)
    )
    assert cloud.d.sum() == pytest.approx(1.0)
    assert np.allclose(cloud.d, solution.d_star.d, atol=1e-10)


@pytest.mark.sinkhorn
def test_cloud_zero_potentials(golden_instance):
    zero = DualPotentials(np.zeros(2), np.zeros(2))
    cloud = solve_cloud(golden_instance, zero).d
    weights = np.exp(-golden_instance.T)
    assert np.allclose(cloud, weights / weights.sum())


@pytest.mark.sinkhorn
def test_projection(golden_instance):
    l, w = golden_instance.shares()
    uniform = Correspondence(np.ones((2, 2)))
    assert np.allclose(
        project_to_polytope(uniform, golden_instance).d,
        np.outer(l, w),
        atol=1e-10,
    )
    kernel = Correspondence(np.exp(-golden_instance.T))
    d_star = solve_sinkhorn(golden_instance).d_star
    assert np.allclose(
        project_to_polytope(kernel, golden_instance).d, d_star.d, atol=1e-10
    )
    counts = project_to_polytope(
        d_star.to_counts(golden_instance.N), golden_instance
    )
    assert np.allclose(counts.d.sum(axis=1), golden_instance.L)
