import math
from fractions import Fraction
from itertools import combinations

import pytest

from app.core.config import settings
from app.core.exceptions import DomainError, ResourceGuardError
from app.models.models import IMPOSSIBLE, BallsBinsModel, SubsetLogTable
from app.services.decision_service import decision_service
from app.services.negdep_service import capped_ways, negdep_service

TWO_TWO = BallsBinsModel(balls=2, bins=2)


def subsets(n):
    for size in range(n + 1):
        for subset in combinations(range(1, n + 1), size):
            yield frozenset(subset)


# ============ Exact probabilities ============
def test_joint_max_probability_examples():
    assert negdep_service.joint_max_probability(TWO_TWO, {1}, 1) == Fraction(3, 4)
    assert negdep_service.joint_max_probability(TWO_TWO, {1, 2}, 1) == Fraction(1, 2)
    assert negdep_service.joint_max_probability(BallsBinsModel(balls=5, bins=3), set(), 0) == 1


def test_joint_max_probability_errors():
    with pytest.raises(DomainError):
        negdep_service.joint_max_probability(TWO_TWO, {3}, 1)
    with pytest.raises(DomainError):
        negdep_service.joint_max_probability(TWO_TWO, {1}, -1)
    with pytest.raises(DomainError):
        BallsBinsModel(balls=2, bins=0)


def test_full_set_with_all_balls_allowed_is_certain():
    for m in range(0, 7):
        for n in range(1, 5):
            model = BallsBinsModel(balls=m, bins=n)
            assert negdep_service.joint_max_probability(model, range(1, n + 1), m) == 1


@pytest.mark.parametrize("m, n", [(2, 2), (4, 3), (5, 4), (6, 2)])
def test_counting_matches_enumeration(m, n):
    model = BallsBinsModel(balls=m, bins=n)
    law = negdep_service.enumerate_joint_counts(model)
    assert sum(law.values()) == 1
    for subset in subsets(n):
        for t in range(m + 1):
            enumerated = sum(p for counts, p in law.items() if all(counts[i - 1] <= t for i in subset))
            assert negdep_service.joint_max_probability(model, subset, t) == enumerated


def test_capped_ways_counts_assignments():
    # 3 labeled balls into 2 bins, at most 2 per bin: 2^3 minus the 2 all-in-one drops
    assert capped_ways(2, 3, 2)[3] == 6
    assert capped_ways(0, 3, 5) == (1, 0, 0, 0)


def test_enumeration_guard(monkeypatch):
    monkeypatch.setattr(settings, "ENUMERATION_LIMIT", 100)
    with pytest.raises(ResourceGuardError):
        negdep_service.enumerate_joint_counts(BallsBinsModel(balls=5, bins=3))


def test_counting_guard(monkeypatch):
    monkeypatch.setattr(settings, "DP_LIMIT", 10)
    with pytest.raises(ResourceGuardError):
        negdep_service.joint_max_probability(BallsBinsModel(balls=10, bins=4), {1, 2}, 3)


# ============ Subset log table ============
def test_subset_log_table_examples():
    table = negdep_service.build_subset_log_table(TWO_TWO, 1)
    assert table[set()] == 0.0
    assert table[{1}] == pytest.approx(math.log(0.75))
    assert table[{2}] == pytest.approx(math.log(0.75))
    assert table[{1, 2}] == pytest.approx(math.log(0.5))

    vacuous = negdep_service.build_subset_log_table(BallsBinsModel(balls=3, bins=3), 3)
    assert all(value == 0.0 for value in vacuous.values.values())

    single = negdep_service.build_subset_log_table(BallsBinsModel(balls=1, bins=2), 0)
    assert single[{1}] == pytest.approx(math.log(0.5))
    assert single[{1, 2}] is IMPOSSIBLE


def test_subset_table_guard():
    with pytest.raises(ResourceGuardError):
        negdep_service.build_subset_log_table(BallsBinsModel(balls=1, bins=settings.SUBSET_TABLE_MAX_BINS + 1), 0)


def test_table_depends_only_on_subset_size():
    table = negdep_service.build_subset_log_table(BallsBinsModel(balls=5, bins=4), 2)
    by_size = {}
    for subset, value in table.values.items():
        by_size.setdefault(len(subset), set()).add(value)
    assert all(len(values) == 1 for values in by_size.values())


def test_table_is_monotone_under_supersets():
    table = negdep_service.build_subset_log_table(BallsBinsModel(balls=6, bins=4), 2)
    for a in table.values:
        for b in table.values:
            if a <= b:
                assert table.exact[b] <= table.exact[a]


# ============ Submodularity / Han ============
def test_submodular_examples():
    result = negdep_service.check_submodular(negdep_service.build_subset_log_table(TWO_TWO, 1))
    assert result.holds and result.violation is None

    modular = SubsetLogTable(n=3, threshold=0, values={s: -float(len(s)) for s in subsets(3)})
    assert negdep_service.check_submodular(modular).holds

    violating = SubsetLogTable(
        n=2,
        threshold=0,
        values={frozenset(): 0.0, frozenset({1}): -1.0, frozenset({2}): -1.0, frozenset({1, 2}): -1.0},
    )
    result = negdep_service.check_submodular(violating)
    assert not result.holds
    assert set(result.violation) == {frozenset({1}), frozenset({2})}


def test_submodular_with_impossible_union():
    table = SubsetLogTable(
        n=2,
        threshold=0,
        values={frozenset(): 0.0, frozenset({1}): -1.0, frozenset({2}): -1.0, frozenset({1, 2}): IMPOSSIBLE},
    )
    assert negdep_service.check_submodular(table).holds


def test_hans_examples():
    table = negdep_service.build_subset_log_table(TWO_TWO, 1)
    assert negdep_service.check_hans(table, 1)
    assert negdep_service.check_hans(table, 2)
    with pytest.raises(DomainError):
        negdep_service.check_hans(table, 0)


def test_lemma2_examples():
    average, bound = negdep_service.check_lemma2(TWO_TWO, 1, 1)
    assert average == pytest.approx(0.75)
    assert bound == pytest.approx(math.sqrt(0.5))

    average, bound = negdep_service.check_lemma2(TWO_TWO, 1, 2)
    assert average == pytest.approx(bound)


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("n", range(1, 5))
def test_small_models_satisfy_all_inequalities(m, n):
    model = BallsBinsModel(balls=m, bins=n)
    for t in range(m + 1):
        table = negdep_service.build_subset_log_table(model, t)
        assert negdep_service.check_submodular(table).holds
        for r in range(1, n + 1):
            assert negdep_service.check_hans(table, r)
            assert negdep_service.lemma2_holds_exactly(model, t, r)
            assert negdep_service.check_lemma2(model, t, r).holds()


# ============ Count thresholds ============
@pytest.mark.parametrize("m, n", [(0, 3), (5, 4), (6, 3), (24, 8)])
def test_augmented_count_polynomial_brackets(m, n):
    model = BallsBinsModel(balls=m, bins=n)
    for t in range(m + 1):
        coefficients = negdep_service.augmented_count_polynomial(model, t)
        assert coefficients[0] == negdep_service.max_count_cdf(model, t - 1)
        assert sum(coefficients) == negdep_service.max_count_cdf(model, t)


def test_augmented_count_threshold_hits_target():
    model = BallsBinsModel(balls=24, bins=8)
    for p in (0.05, 0.3, 0.77, 0.99):
        t, u = negdep_service.augmented_count_threshold(model, p)
        coefficients = negdep_service.augmented_count_polynomial(model, int(t))
        value = sum(float(q) * u ** k for k, q in enumerate(coefficients))
        assert value == pytest.approx(p, abs=1e-9)


def test_no_balls_reduces_to_uniform_thresholds():
    model = BallsBinsModel(balls=0, bins=5)
    d = decision_service.optimal_decision_numbers(5)
    thresholds = negdep_service.count_thresholds(model)
    assert thresholds.primary.tolist() == [0.0] * 5
    assert thresholds.tiebreak == pytest.approx(d.as_array(), abs=1e-9)


def test_interpolated_threshold_uses_linear_weight():
    model = BallsBinsModel(balls=0, bins=3)
    assert negdep_service.interpolated_count_threshold(model, 0.4) == (0.0, pytest.approx(0.4))
    with pytest.raises(DomainError):
        negdep_service.count_thresholds(model, method="spline")


def test_interpolated_threshold_misses_empty_anchor():
    model = BallsBinsModel(balls=0, bins=3)
    d = 0.6
    interpolated = negdep_service.interpolated_count_threshold(model, d ** 3)
    exact = negdep_service.augmented_count_threshold(model, d ** 3)
    assert interpolated.tiebreak == pytest.approx(d ** 3)
    assert exact.tiebreak == pytest.approx(d, abs=1e-9)


# ============ Balls-and-bins secretary ============
def test_single_bin_always_wins():
    result = negdep_service.simulate_balls_bins_secretary(BallsBinsModel(balls=4, bins=1), 2_000, seed=3)
    assert result.rate == 1.0


def test_empty_bins_behave_like_iid_uniform():
    n = 5
    result = negdep_service.simulate_balls_bins_secretary(BallsBinsModel(balls=0, bins=n), 40_000, seed=8)
    target = decision_service.optimal_success_probability(n)
    assert abs(result.rate - target) <= 4 * result.stderr


def test_balls_bins_reproducible_across_workers():
    model = BallsBinsModel(balls=12, bins=4)
    serial = negdep_service.simulate_balls_bins_secretary(model, 25_000, seed=10, workers=1)
    parallel = negdep_service.simulate_balls_bins_secretary(model, 25_000, seed=10, workers=2)
    assert serial == parallel
