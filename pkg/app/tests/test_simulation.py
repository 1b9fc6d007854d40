import itertools
import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from pydantic import ValidationError

from app.core.exceptions import DomainError, ResourceGuardError
from app.core.random_streams import RandomStream
from app.models.distributions import Uniform
from app.schemas.schemas import ExperimentConfig, SimulationResult
from app.services.decision_service import decision_service
from app.services.simulation_service import block_layout, simulation_service


def uniform_config(n, trials, **kwargs):
    return ExperimentConfig(distributions=[Uniform()] * n, trials=trials, **kwargs)


# ============ Permutations ============
def test_random_permutation_basics():
    assert simulation_service.random_permutation(1, RandomStream(1)) == [1]
    assert simulation_service.random_permutation(5, RandomStream(3, 9)) == simulation_service.random_permutation(
        5, RandomStream(3, 9)
    )
    with pytest.raises(DomainError):
        simulation_service.random_permutation(0, RandomStream(1))


def test_random_permutation_is_uniform():
    rng = RandomStream(2024)
    counts = Counter(tuple(simulation_service.random_permutation(3, rng)) for _ in range(60_000))
    assert set(counts) == set(itertools.permutations((1, 2, 3)))
    for count in counts.values():
        assert abs(count / 60_000 - 1 / 6) < 0.01


def test_block_permutations_are_uniform():
    rows = RandomStream(77).permuted_rows(600_000, 3)
    codes = rows[:, 0] * 9 + rows[:, 1] * 3 + rows[:, 2]
    _, counts = np.unique(codes, return_counts=True)
    assert len(counts) == 6
    assert np.all(np.abs(counts / 600_000 - 1 / 6) < 0.005)


def test_block_layout_covers_trials():
    assert block_layout(25_000, 10_000) == [(0, 10_000), (1, 10_000), (2, 5_000)]
    assert block_layout(1, 10_000) == [(0, 1)]


# ============ Config ============
def test_config_validation():
    with pytest.raises(ValidationError):
        uniform_config(3, 0)
    with pytest.raises(ValidationError):
        ExperimentConfig(distributions=[], trials=10)
    with pytest.raises(ValidationError):
        uniform_config(3, 10, mode="sample-based")
    with pytest.raises(ValidationError):
        uniform_config(3, 10, epsilon=0.1)
    with pytest.raises(ValidationError):
        uniform_config(3, 10, decision_numbers=[0.5, 0.0])


def test_config_round_trip():
    config = ExperimentConfig.model_validate(
        {
            "distributions": [{"kind": "uniform", "lo": 0, "hi": 2}, {"kind": "discrete", "values": [1, 2], "probs": [0.5, 0.5]}],
            "trials": 100,
            "seed": 9,
        }
    )
    assert ExperimentConfig.model_validate_json(config.model_dump_json()) == config


def test_wilson_interval_contains_rate():
    for wins in (0, 1, 500, 999, 1000):
        result = SimulationResult.from_counts(n=2, mode="full-knowledge", trials=1000, wins=wins, reference_bound=0.75)
        assert result.ci95_low <= result.rate <= result.ci95_high
        assert 0.0 <= result.ci95_low and result.ci95_high <= 1.0


def test_stderr_follows_wilson_half_width():
    certain = SimulationResult.from_counts(n=1, mode="full-knowledge", trials=1000, wins=1000, reference_bound=1.0)
    assert certain.stderr > 0.0
    assert certain.ci95_low < 1.0

    even = SimulationResult.from_counts(n=2, mode="full-knowledge", trials=1000, wins=500, reference_bound=0.75)
    assert even.stderr == pytest.approx(math.sqrt(0.25 / 1000), rel=1e-2)
    z = (even.ci95_high - even.ci95_low) / (2 * even.stderr)
    assert z == pytest.approx(1.959964, rel=1e-5)


# ============ Experiments ============
def test_single_draw_always_wins():
    result = simulation_service.run_experiment(uniform_config(1, 2_000))
    assert result.rate == 1.0


def test_two_uniforms_match_formula():
    result = simulation_service.run_experiment(uniform_config(2, 100_000, decision_numbers=[0.5, 0.0]))
    assert result.reference_bound == pytest.approx(0.75)
    assert abs(result.rate - 0.75) <= 4 * result.stderr


def test_heterogeneous_instance_beats_formula(heterogeneous5):
    config = ExperimentConfig(distributions=heterogeneous5, trials=100_000, seed=31)
    result = simulation_service.run_experiment(config)
    bound = decision_service.optimal_success_probability(5)
    assert result.reference_bound == pytest.approx(bound)
    assert result.rate >= bound - 3 * result.stderr


def test_degenerate_decision_numbers():
    never = simulation_service.run_experiment(uniform_config(4, 20_000, decision_numbers=[1.0] * 4))
    assert never.wins == 0

    first = simulation_service.run_experiment(uniform_config(4, 40_000, decision_numbers=[0.0] * 4))
    stderr = math.sqrt(0.25 * 0.75 / 40_000)
    assert abs(first.rate - 0.25) <= 4 * stderr


def test_results_do_not_depend_on_workers():
    config = uniform_config(5, 25_000, seed=4242, include_baseline=True)
    serial = simulation_service.run_experiment(config, workers=1)
    parallel = simulation_service.run_experiment(config, workers=2)
    assert serial == parallel
    assert serial.classical_rate is not None


# ============ Subset averages ============
def test_lemma1_examples():
    assert tuple(simulation_service.lemma1_check([0.5, 0.5], 1)) == pytest.approx((0.5, 0.5))
    assert tuple(simulation_service.lemma1_check([0.9, 0.1], 1)) == pytest.approx((0.5, 0.3))


def test_lemma1_errors():
    with pytest.raises(DomainError):
        simulation_service.lemma1_check([0.5, 0.5], 3)
    with pytest.raises(DomainError):
        simulation_service.lemma1_check([1.5], 1)
    with pytest.raises(ResourceGuardError):
        simulation_service.lemma1_check([0.5] * 21, 2)


def test_lemma1_equality_for_equal_entries():
    average, bound = simulation_service.lemma1_check([0.3] * 6, 4)
    assert average == pytest.approx(bound, abs=1e-12)


@hypothesis_settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=10), st.data())
def test_lemma1_average_dominates_power_bound(a, data):
    r = data.draw(st.integers(min_value=1, max_value=len(a)))
    assert simulation_service.lemma1_check(a, r).holds()
