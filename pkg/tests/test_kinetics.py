from itertools import product
from math import exp

import numpy as np
import pytest
from correspondence.models import OdInstance
from correspondence.solver import solve_sinkhorn
from django.core.exceptions import ValidationError
from kinetics.models import (KineticsState, KineticsTrajectory, Snapshot,
                             SwapChannel)
from kinetics.simulator import (check_state, in_polytope, simulate,
                                swap_channels, swap_rate)
from kinetics.stationary import (detailed_balance_residual,
                                 enumerate_states, exchange_image,
                                 occupation_law, stationary_exact,
                                 total_variation)
from kinetics.statistics import (concentration_radius, concentration_test,
                                 corner_state, default_burn_in, half_time,
                                 largest_remainder, mixing_scaling,
                                 rounded_state, scaled_instance,
                                 trajectory_frame)


def valid_pairs(inst, law):
    """Все пары (состояние, канал), для которых определена невязка."""
    for state in law.states:
        d = state.reshape(inst.n, inst.n)
        for channel in swap_channels(inst.n):
            if exchange_image(d, channel).min() >= 0:
                yield d, channel


@pytest.mark.kinetics
def test_swap_rate():
    inst = OdInstance(
        L=[5, 5], W=[5, 5], T=[[0.0, 2.0], [2.0, 0.0]], beta=1.0,
    )
    assert swap_rate(0, 1, 1, 0, inst, 1.0) == pytest.approx(
        0.7389056, abs=1e-7
    )
    assert swap_rate(0, 0, 1, 1, inst, 1.0) == pytest.approx(
        0.1 * exp(-2)
    )


@pytest.mark.kinetics
def test_swap_channels():
    assert len(swap_channels(2)) == 4
    assert len(swap_channels(3)) == 36
    assert not any(channel.is_identity for channel in swap_channels(3))
    channel = SwapChannel(0, 1, 2, 0)
    assert channel.delta(3).sum() == 0
    assert np.array_equal(channel.reverse().delta(3), -channel.delta(3))
    assert channel.delta(3)[0, 1] == -1
    assert channel.delta(3)[2, 1] == 1


@pytest.mark.kinetics
def test_check_state(small_instance):
    check_state(np.array([[1, 1], [1, 1]]), small_instance)
    for d in ([[2, 1], [1, 1]], [[3, -1], [-1, 3]], [[4]]):
        with pytest.raises(ValidationError) as exc:
            check_state(np.array(d), small_instance)
        assert exc.value.code == 'OUT_OF_POLYTOPE'


@pytest.mark.kinetics
def test_check_state_needs_integral_margins():
    inst = OdInstance(L=[0.5, 0.5], W=[0.5, 0.5], T=np.zeros((2, 2)),
                      beta=0.0)
    with pytest.raises(ValidationError) as exc:
        check_state(np.zeros((2, 2)), inst)
    assert exc.value.code == 'OUT_OF_POLYTOPE'


@pytest.mark.kinetics
def test_single_district_has_no_events():
    inst = OdInstance(L=[5], W=[5], T=[[0.0]], beta=1.0)
    with pytest.raises(ValidationError) as exc:
        simulate(inst, KineticsState([[5]]), 1.0, 10, 1, seed=0)
    assert exc.value.code == 'EMPTY_PROPENSITY'


@pytest.mark.kinetics
def test_simulation_conserves_margins(golden_instance):
    d0 = corner_state(
        golden_instance, solve_sinkhorn(golden_instance).d_star
    )
    traj = simulate(
        golden_instance, KineticsState(d0), 1.0, 5000, 50, seed=7
    )
    assert traj.events == 5000
    assert len(traj.samples) == 101
    assert traj.population == 1000
    times = [snap.t for snap in traj.samples]
    assert all(later > earlier for earlier, later in zip(times, times[1:]))
    for snap in traj.samples:
        assert in_polytope(snap.state, golden_instance)


@pytest.mark.kinetics
def test_simulation_is_reproducible(golden_instance):
    d0 = rounded_state(
        golden_instance, solve_sinkhorn(golden_instance).d_star
    )
    first, second, other = (
        simulate(golden_instance, KineticsState(d0), 1.0, 2000, 100, seed)
        for seed in (11, 11, 12)
    )
    assert first.rng_id == 'numpy.PCG64'
    for left, right in zip(first.samples, second.samples):
        assert left.t == right.t
        assert np.array_equal(left.state, right.state)
    assert any(
        not np.array_equal(left.state, right.state)
        for left, right in zip(first.samples, other.samples)
    )


@pytest.mark.kinetics
def test_enumerate_states():
    assert len(enumerate_states(np.array([2, 2]), np.array([2, 2]))) == 3
    permutations = enumerate_states(np.array([1, 1, 1]), np.array([1, 1, 1]))
    assert len(permutations) == 6
    assert all(state.sum() == 3 for state in permutations)
    with pytest.raises(ValidationError) as exc:
        enumerate_states(np.array([2, 2]), np.array([2, 2]), limit=2)
    assert exc.value.code == 'STATE_SPACE_TOO_LARGE'


@pytest.mark.kinetics
@pytest.mark.parametrize('beta, cost', ((0.5, 1.0), (2.0, 0.3)))
def test_stationary_two_residents(beta, cost):
    inst = OdInstance(
        L=[1, 1], W=[1, 1], T=[[0.0, cost], [cost, 0.0]], beta=beta,
    )
    law = stationary_exact(inst)
    stay = law.probability(np.array([[1, 0], [0, 1]]))
    swap = law.probability(np.array([[0, 1], [1, 0]]))
    assert stay + swap == pytest.approx(1.0)
    assert swap / stay == pytest.approx(exp(-2 * beta * cost))


@pytest.mark.kinetics
def test_stationary_without_costs():
    inst = OdInstance(L=[2, 2], W=[2, 2], T=np.ones((2, 2)), beta=0.0)
    law = stationary_exact(inst)
    probabilities = [
        law.probability(np.array([[t, 2 - t], [2 - t, t]]))
        for t in range(3)
    ]
    assert probabilities == pytest.approx([1 / 6, 4 / 6, 1 / 6])
    assert law.probability(np.array([[3, 0], [0, 1]])) == 0.0
    assert list(law.to_frame().columns) == [
        'd_1_1', 'd_1_2', 'd_2_1', 'd_2_2', 'probability',
    ]


@pytest.mark.kinetics
@pytest.mark.parametrize('inst', (
    OdInstance(L=[2, 2], W=[2, 2], T=[[0, 1], [1, 0]], beta=1.0),
    OdInstance(L=[3, 1], W=[1, 3], T=[[0.2, 1.5], [0.7, 0.0]], beta=2.5),
    OdInstance(L=[1, 1, 1], W=[2, 1, 0],
               T=[[0, 1, 2], [1, 0, 1], [2, 1, 0]], beta=0.7),
    OdInstance(L=[2, 1, 1], W=[1, 1, 2],
               T=[[0.5, 1, 3], [1, 0, 1], [2, 1, 0.1]], beta=1.3),
))
def test_detailed_balance(inst):
    law = stationary_exact(inst)
    assert law.probabilities.sum() == pytest.approx(1.0)
    pairs = list(valid_pairs(inst, law))
    assert pairs
    for d, channel in pairs:
        assert detailed_balance_residual(inst, d, channel, law) <= 1e-12


@pytest.mark.kinetics
def test_detailed_balance_invalid(small_instance):
    d = np.array([[2, 0], [0, 2]])
    with pytest.raises(ValidationError) as exc:
        detailed_balance_residual(small_instance, d, SwapChannel(0, 0, 0, 1))
    assert exc.value.code == 'INVALID_CHANNEL'
    # d' = d + e_00 + e_11 - e_10 - e_01 выходит за A
    with pytest.raises(ValidationError) as exc:
        detailed_balance_residual(small_instance, d, SwapChannel(0, 0, 1, 1))
    assert exc.value.code == 'OUT_OF_POLYTOPE'
    assert detailed_balance_residual(
        small_instance, d, SwapChannel(0, 1, 1, 0)
    ) <= 1e-12


@pytest.mark.kinetics
@pytest.mark.slow
@pytest.mark.parametrize('beta', (0.0, 1.0))
def test_occupation_matches_stationary(beta):
    inst = OdInstance(L=[2, 2], W=[2, 2], T=[[0, 1], [1, 0]], beta=beta)
    traj = simulate(
        inst, KineticsState([[1, 1], [1, 1]]), 1.0, 1_000_000, 1000,
        seed=5, track_occupation=True,
    )
    law = stationary_exact(inst)
    assert total_variation(law.as_dict(), occupation_law(traj)) <= 0.02


@pytest.mark.kinetics
def test_occupation_requires_tracking(small_instance):
    traj = simulate(
        small_instance, KineticsState([[1, 1], [1, 1]]), 1.0, 10, 1, seed=0
    )
    with pytest.raises(ValidationError) as exc:
        occupation_law(traj)
    assert exc.value.code == 'INSUFFICIENT_SAMPLES'


@pytest.mark.kinetics
@pytest.mark.parametrize('inst', (
    OdInstance(L=[2, 2], W=[2, 2], T=[[0, 1], [1, 0]], beta=1.0),
    OdInstance(L=[3, 1], W=[1, 3], T=[[0.2, 1.5], [0.7, 0.0]], beta=2.5),
    OdInstance(L=[4, 2], W=[3, 3], T=[[1, 3], [2, 1]], beta=0.5),
    OdInstance(L=[5, 3], W=[2, 6], T=[[0, 1], [1, 0]], beta=0.0),
    OdInstance(L=[1, 1, 1], W=[1, 1, 1],
               T=[[0, 1, 2], [1, 0, 1], [2, 1, 0]], beta=0.7),
))
def test_mode_close_to_equilibrium(inst):
    law = stationary_exact(inst)
    d_star = solve_sinkhorn(inst).d_star
    mode = law.mode()
    assert in_polytope(mode, inst)
    assert np.abs(mode - d_star.to_counts(inst.N).d).max() < 1
    if inst.n == 2:
        # состояния 2x2 отличаются на кратное одному обмену
        nearest = rounded_state(inst, d_star)
        assert np.abs(mode - nearest).sum() <= 4


@pytest.mark.kinetics
def test_total_variation():
    assert total_variation({(1,): 0.5, (2,): 0.5}, {(1,): 1.0}) == 0.5
    assert total_variation({(1,): 1.0}, {(2,): 1.0}) == 1.0


@pytest.mark.kinetics
def test_concentration_radius():
    assert concentration_radius(0.1, 1e4) == pytest.approx(0.0889, abs=1e-4)
    assert concentration_radius(0.1, 4e4) == pytest.approx(
        concentration_radius(0.1, 1e4) / 2
    )
    with pytest.raises(ValidationError) as exc:
        concentration_radius(0.5, 100)
    assert exc.value.code == 'INVALID_RANGE'


def frozen_trajectory(state, population, count):
    return KineticsTrajectory(
        samples=[
            Snapshot(index, float(index), state) for index in range(count)
        ],
        events=count - 1,
        seed=0,
        rng_id='numpy.PCG64',
        population=population,
    )


@pytest.mark.kinetics
def test_concentration_frozen_at_target(golden_instance):
    d_star = solve_sinkhorn(golden_instance).d_star
    state = rounded_state(golden_instance, d_star)
    report = concentration_test(
        frozen_trajectory(state, 1000, 150), d_star, 0.1, burn_in=0
    )
    assert report.samples == 150
    assert report.exceedances == 0
    assert report.passed


@pytest.mark.kinetics
def test_concentration_far_from_target(golden_instance):
    d_star = solve_sinkhorn(golden_instance).d_star
    state = corner_state(golden_instance, d_star)
    report = concentration_test(
        frozen_trajectory(state, 1000, 150), d_star, 0.1, burn_in=0
    )
    assert report.exceedances == 150
    assert not report.passed


@pytest.mark.kinetics
def test_concentration_insufficient_samples(golden_instance):
    d_star = solve_sinkhorn(golden_instance).d_star
    traj = frozen_trajectory(rounded_state(golden_instance, d_star), 1000, 150)
    with pytest.raises(ValidationError) as exc:
        concentration_test(traj, d_star, 0.1, burn_in=60)
    assert exc.value.code == 'INSUFFICIENT_SAMPLES'


@pytest.mark.kinetics
@pytest.mark.slow
def test_concentration_golden(golden_instance):
    inst = scaled_instance(golden_instance, 10_000)
    d_star = solve_sinkhorn(inst).d_star
    burn_in = default_burn_in(inst.N)
    traj = simulate(
        inst, KineticsState(rounded_state(inst, d_star)), 1.0,
        burn_in + 200 * 500, 500, seed=2024,
    )
    report = concentration_test(traj, d_star, 0.1)
    assert report.samples >= 200
    assert report.radius == pytest.approx(0.0889, abs=1e-4)
    assert report.passed
    frame = trajectory_frame(traj, d_star)
    assert list(frame.columns) == ['event_index', 't', 'dist_to_dstar']
    assert frame['dist_to_dstar'].iloc[-1] < report.radius


@pytest.mark.kinetics
def test_start_states(golden_instance):
    d_star = solve_sinkhorn(golden_instance).d_star
    corner = corner_state(golden_instance, d_star)
    rounded = rounded_state(golden_instance, d_star)
    assert in_polytope(corner, golden_instance)
    assert in_polytope(rounded, golden_instance)
    assert (corner == 0).sum() >= golden_instance.n - 1
    shares = d_star.d
    assert (
        np.linalg.norm(corner / 1000 - shares)
        > np.linalg.norm(rounded / 1000 - shares)
    )
    assert np.abs(rounded / 1000 - shares).max() <= 2 / 1000


@pytest.mark.kinetics
@pytest.mark.parametrize('seed', (3, 11))
def test_corner_state_many_districts(random_instance, seed):
    inst = scaled_instance(random_instance(seed, n=12), 1200)
    d_star = solve_sinkhorn(inst).d_star
    corner = corner_state(inst, d_star)
    rounded = rounded_state(inst, d_star)
    assert in_polytope(corner, inst)
    assert np.count_nonzero(corner) <= 2 * inst.n - 1
    shares = d_star.to_shares(inst.N).d
    assert (
        np.linalg.norm(corner / inst.N - shares)
        > np.linalg.norm(rounded / inst.N - shares)
    )


@pytest.mark.kinetics
@pytest.mark.parametrize('shares, N', (
    ([0.6, 0.4], 10_001), ([1 / 3] * 3, 100), ([0.5, 0.25, 0.25], 7),
))
def test_largest_remainder(shares, N):
    counts = largest_remainder(np.array(shares), N)
    assert counts.sum() == N
    assert np.abs(counts - np.array(shares) * N).max() < 1


@pytest.mark.kinetics
def test_half_time_no_crossing(golden_instance):
    d_star = solve_sinkhorn(golden_instance).d_star
    corner = corner_state(golden_instance, d_star)
    with pytest.raises(ValidationError) as exc:
        half_time(golden_instance, corner, d_star, 0.1, 10, seed=0)
    assert exc.value.code == 'NO_CROSSING'
    assert half_time(
        golden_instance, rounded_state(golden_instance, d_star), d_star,
        0.1, 10, seed=0,
    ) == 0


@pytest.mark.kinetics
def test_mixing_no_crossing(golden_instance):
    with pytest.raises(ValidationError) as exc:
        mixing_scaling(
            golden_instance, [1000, 3000, 10_000, 30_000], horizon_events=10
        )
    assert exc.value.code == 'NO_CROSSING'


@pytest.mark.kinetics
def test_mixing_degenerate_start(golden_instance):
    report = mixing_scaling(
        golden_instance, [100, 300, 1000, 3000], start='dstar'
    )
    assert report.degenerate
    assert not report.passed
    assert np.isnan(report.slope)
    assert [row.t_half for row in report.rows] == [0.0] * 4


@pytest.mark.kinetics
@pytest.mark.parametrize('grid, seeds', (
    ([100, 200, 300, 400], 10),
    ([100, 1000, 10_000], 10),
    ([100, 300, 1000, 3000], 5),
))
def test_mixing_invalid_grid(golden_instance, grid, seeds):
    with pytest.raises(ValidationError) as exc:
        mixing_scaling(golden_instance, grid, seeds=seeds)
    assert exc.value.code == 'INVALID_RANGE'


@pytest.mark.kinetics
@pytest.mark.slow
def test_mixing_scales_as_n_log_n():
    inst = OdInstance(L=[1, 1], W=[1, 1], T=[[0, 1], [1, 0]], beta=3.0)
    report = mixing_scaling(
        inst, [1000, 3000, 10_000, 30_000], seeds=10, seed=1, workers=4
    )
    assert [row.replicas for row in report.rows] == [10] * 4
    assert all(row.start_distance > row.threshold for row in report.rows)
    times = [row.t_half for row in report.rows]
    assert all(later > earlier for earlier, later in zip(times, times[1:]))
    assert not report.degenerate
    assert 0.8 <= report.slope <= 1.2
    assert report.passed


@pytest.mark.kinetics
def test_detailed_balance_all_states_and_channels():
    inst = OdInstance(L=[2, 2], W=[3, 1], T=[[1, 0], [0, 2]], beta=0.4)
    law = stationary_exact(inst)
    checked = 0
    for state, channel in product(law.states, swap_channels(2)):
        d = state.reshape(2, 2)
        if exchange_image(d, channel).min() < 0:
            continue
        assert detailed_balance_residual(inst, d, channel, law, lam=2.5) \
            <= 1e-12
        checked += 1
    assert checked > 0
