import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st

from app.core.exceptions import DomainError, UsageError
from app.core.random_streams import RandomStream
from app.models.distributions import AugmentedValue, Exponential, Uniform
from app.models.models import DecisionNumbers, PolicyState, Thresholds
from app.services.decision_service import decision_service
from app.services.strategy_service import strategy_service

TAU = Thresholds.from_values([0.6, 0.4, 0.0])


# ============ Thresholds ============
def test_thresholds_for_two_uniforms():
    tau = strategy_service.thresholds_from_decision_numbers([Uniform(), Uniform()], DecisionNumbers((0.5, 0.0)))
    assert tau.primary == pytest.approx([0.5, 0.0])


def test_iid_uniform_thresholds_equal_decision_numbers():
    d = decision_service.optimal_decision_numbers(12)
    tau = strategy_service.thresholds_from_decision_numbers([Uniform()] * 12, d)
    assert tau.primary == pytest.approx(d.as_array(), abs=1e-12)


def test_exponential_zero_threshold_is_support_infimum():
    tau = strategy_service.thresholds_from_decision_numbers([Exponential()], DecisionNumbers((0.0,)))
    assert tau[0] == AugmentedValue(0.0, 0.0)


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        strategy_service.thresholds_from_decision_numbers([Uniform()], DecisionNumbers((0.5, 0.0)))


def test_thresholds_are_nonincreasing(heterogeneous5):
    d = decision_service.optimal_decision_numbers(5)
    tau = list(strategy_service.thresholds_from_decision_numbers(heterogeneous5, d))
    assert all(b <= a for a, b in zip(tau, tau[1:]))


# ============ Policy ============
def test_policy_step_examples():
    assert not strategy_service.policy_step(PolicyState(), 1, 0.3, TAU)
    assert strategy_service.policy_step(PolicyState(step=1, best=AugmentedValue(0.3)), 2, 0.7, TAU)
    state = PolicyState(step=1, best=AugmentedValue(0.3))
    assert not strategy_service.policy_step(state, 2, 0.2, Thresholds.from_values([0.6, 0.1, 0.0]))
    assert state.best == AugmentedValue(0.3)


def test_policy_step_out_of_order():
    with pytest.raises(UsageError):
        strategy_service.policy_step(PolicyState(), 2, 0.5, TAU)


def test_policy_step_compares_lexicographically():
    tau = Thresholds.from_values([AugmentedValue(1.0, 0.5)])
    assert not strategy_service.policy_step(PolicyState(), 1, AugmentedValue(1.0, 0.4), tau)
    assert strategy_service.policy_step(PolicyState(), 1, AugmentedValue(1.0, 0.6), tau)


@pytest.mark.parametrize(
    "draws, picked, win",
    [
        ((0.3, 0.7, 0.5), 2, True),
        ((0.9, 0.1, 0.2), 1, True),
        ((0.5, 0.4, 0.3), None, False),
    ],
)
def test_run_episode_hand_traces(draws, picked, win):
    outcome = strategy_service.run_episode(draws, TAU)
    assert outcome.picked == picked
    assert outcome.win is win


def test_no_earlier_pick_on_all_permutations():
    values = (0.1, 0.35, 0.5, 0.8)
    tau = Thresholds.from_values([0.9, 0.7, 0.3, 0.0])
    for order in itertools.permutations(values):
        outcome = strategy_service.run_episode(order, tau)
        for r in range(1, 5):
            best_at = int(np.argmax(order[:r]))
            if order[best_at] <= tau[best_at].primary:
                assert outcome.picked is None or outcome.picked > r


@hypothesis_settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8, unique=True))
def test_accepted_value_is_a_running_maximum(draws):
    n = len(draws)
    tau = Thresholds.from_values(np.linspace(0.8, 0.0, n))
    outcome = strategy_service.run_episode(draws, tau)
    if outcome.picked is not None:
        k = outcome.picked - 1
        assert draws[k] == max(draws[: k + 1])
        assert draws[k] > tau[k].primary


# ============ Classical baseline ============
def test_classical_baseline_examples():
    assert strategy_service.classical_baseline([0.4]).win
    increasing = strategy_service.classical_baseline([1.0, 2.0, 3.0])
    assert increasing.picked == 3 and increasing.win


def test_classical_rate_is_one_over_e():
    rng = RandomStream(99, 0)
    values = rng.random((100_000, 100))
    tiebreak = np.zeros_like(values)
    rate = strategy_service.batch_classical_wins(values, tiebreak).mean()

    k = strategy_service.observation_phase(100)
    exact = k / 100 * math.fsum(1 / i for i in range(k, 100))
    stderr = math.sqrt(exact * (1 - exact) / 100_000)
    assert abs(rate - exact) <= 4 * stderr
    assert rate == pytest.approx(1 / math.e, abs=0.015)


def test_batch_wins_agree_with_run_episode():
    rng = RandomStream(5, 0)
    values = rng.random((200, 6))
    tiebreak = rng.substream(1).random((200, 6))
    d = decision_service.optimal_decision_numbers(6)
    tau = strategy_service.thresholds_from_decision_numbers([Uniform()] * 6, d)
    batch = strategy_service.batch_wins(values, tiebreak, tau)
    for row in range(200):
        draws = [AugmentedValue(v, t) for v, t in zip(values[row], tiebreak[row])]
        assert batch[row] == strategy_service.run_episode(draws, tau).win
