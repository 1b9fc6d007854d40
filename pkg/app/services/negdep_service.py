"""
Negative Dependence Service
Exact balls-and-bins probabilities, the submodular log table g, Han's
inequality, the subset-average bound, and the balls-and-bins secretary run.
"""
import logging
import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from app.core.config import settings
from app.core.exceptions import DomainError
from app.core.random_streams import RandomStream
from app.middleware.guards import ResourceGuard
from app.models.distributions import AugmentedValue
from app.models.models import (
    IMPOSSIBLE,
    BallsBinsModel,
    BoundCheck,
    LogProbability,
    SubsetLogTable,
    Thresholds,
)
from app.schemas.schemas import SimulationResult
from app.services.decision_service import decision_service
from app.services.simulation_service import block_layout, run_blocks
from app.services.strategy_service import strategy_service

logger = logging.getLogger(__name__)

LOG_SLACK = 1e-12


class SubmodularityCheck(NamedTuple):
    holds: bool
    violation: Optional[Tuple[FrozenSet[int], FrozenSet[int]]] = None


@lru_cache(maxsize=4096)
def capped_ways(bins: int, balls: int, cap: int) -> Tuple[int, ...]:
    """
    W[k] = number of ways to drop k labeled balls (k = 0..balls) into ``bins``
    bins so that every bin receives at most ``cap`` balls.
    """
    ways = [1] + [0] * balls
    for _ in range(bins):
        ways = [
            sum(math.comb(k, j) * ways[k - j] for j in range(0, min(cap, k) + 1))
            for k in range(balls + 1)
        ]
    return tuple(ways)


def _log(p: Fraction) -> LogProbability:
    return IMPOSSIBLE if p == 0 else math.log(p)


def _add(*terms: LogProbability) -> LogProbability:
    if any(t is IMPOSSIBLE for t in terms):
        return IMPOSSIBLE
    return math.fsum(terms)


def _at_least(lhs: LogProbability, rhs: LogProbability) -> bool:
    """lhs >= rhs in the extended reals, with LOG_SLACK tolerance."""
    if rhs is IMPOSSIBLE:
        return True
    if lhs is IMPOSSIBLE:
        return False
    return lhs >= rhs - LOG_SLACK


def _count_block_wins(task) -> Tuple[int, int]:
    model, thresholds, seed, block, rows = task
    stream = RandomStream(seed, block)
    n = model.bins
    counts = stream.substream(0).multinomial(model.balls, np.full(n, 1.0 / n), size=rows)
    order = stream.substream(1).permuted_rows(rows, n)
    presented = np.take_along_axis(counts.astype(float), order, axis=1)
    tiebreak = stream.substream(2).random((rows, n))
    return int(strategy_service.batch_wins(presented, tiebreak, thresholds).sum()), 0


class NegDepService:
    """Balls-and-bins machinery for negatively dependent draws"""

    # ============ Exact probabilities ============
    @staticmethod
    def _normalize_subset(model: BallsBinsModel, subset: Iterable[int]) -> FrozenSet[int]:
        subset = frozenset(int(i) for i in subset)
        if any(i < 1 or i > model.bins for i in subset):
            raise DomainError(f"Subset {sorted(subset)} is not contained in 1..{model.bins}")
        return subset

    def capped_size_probability(self, model: BallsBinsModel, size: int, threshold: int) -> Fraction:
        """Pr[every bin of a fixed set of ``size`` bins holds <= threshold balls]"""
        m, n = model.balls, model.bins
        if threshold < 0:
            return Fraction(1) if size == 0 else Fraction(0)
        ResourceGuard.check_counting_dp(m, size, threshold)
        capped = capped_ways(size, m, threshold)
        free = n - size
        ways = sum(math.comb(m, k) * capped[k] * free ** (m - k) for k in range(m + 1))
        return Fraction(ways, n ** m)

    def joint_max_probability(self, model: BallsBinsModel, subset: Iterable[int], threshold: int) -> Fraction:
        """E[prod_{i in A} 1[X_i <= T]] by generating-polynomial counting"""
        if threshold < 0:
            raise DomainError(f"Threshold must be nonnegative, got {threshold}")
        subset = self._normalize_subset(model, subset)
        return self.capped_size_probability(model, len(subset), threshold)

    def enumerate_joint_counts(self, model: BallsBinsModel) -> Dict[Tuple[int, ...], Fraction]:
        """Exact law of the count vector by brute-force enumeration of all n^m drops"""
        ResourceGuard.check_enumeration(model.bins, model.balls)
        law: Dict[Tuple[int, ...], int] = {}
        for drop in product(range(model.bins), repeat=model.balls):
            counts = [0] * model.bins
            for b in drop:
                counts[b] += 1
            key = tuple(counts)
            law[key] = law.get(key, 0) + 1
        total = model.bins ** model.balls
        return {key: Fraction(ways, total) for key, ways in law.items()}

    # ============ Subset log table ============
    def build_subset_log_table(self, model: BallsBinsModel, threshold: int) -> SubsetLogTable:
        """g(A) = log Pr[max over A <= T] for all A; bins are exchangeable, so P depends on |A|."""
        n = model.bins
        ResourceGuard.check_subset_table(n)
        by_size = [self.capped_size_probability(model, s, threshold) for s in range(n + 1)]
        values: Dict[FrozenSet[int], LogProbability] = {}
        exact: Dict[FrozenSet[int], Fraction] = {}
        for size in range(n + 1):
            for subset in combinations(range(1, n + 1), size):
                key = frozenset(subset)
                exact[key] = by_size[size]
                values[key] = _log(by_size[size])
        return SubsetLogTable(n=n, threshold=threshold, values=values, exact=exact)

    def check_submodular(self, table: SubsetLogTable) -> SubmodularityCheck:
        """g(A) + g(B) >= g(A | B) + g(A & B) over all pairs; exact when probabilities are known"""
        subsets = list(table.values)
        for idx, a in enumerate(subsets):
            for b in subsets[idx + 1:]:
                if a <= b or b <= a:
                    continue
                union, inter = a | b, a & b
                if table.exact is not None:
                    ok = table.exact[a] * table.exact[b] >= table.exact[union] * table.exact[inter]
                else:
                    ok = _at_least(_add(table.values[a], table.values[b]),
                                   _add(table.values[union], table.values[inter]))
                if not ok:
                    return SubmodularityCheck(False, (a, b))
        return SubmodularityCheck(True)

    def check_hans(self, table: SubsetLogTable, r: int) -> bool:
        """(r/n) g([n]) <= average of g over the r-subsets"""
        n = table.n
        if not 1 <= r <= n:
            raise DomainError(f"r must lie in 1..{n}, got {r}")
        full = table[table.ground_set]
        lhs = IMPOSSIBLE if full is IMPOSSIBLE else (r / n) * full
        layer = [table.values[frozenset(s)] for s in combinations(range(1, n + 1), r)]
        rhs = _add(*layer)
        if rhs is not IMPOSSIBLE:
            rhs = rhs / len(layer)
        return _at_least(rhs, lhs)

    def check_lemma2(self, model: BallsBinsModel, threshold: int, r: int) -> BoundCheck:
        """(average over r-subsets of Pr[max <= T], Pr[max over [n] <= T]^(r/n))"""
        n = model.bins
        if not 1 <= r <= n:
            raise DomainError(f"r must lie in 1..{n}, got {r}")
        average = self.subset_average(model, threshold, r)
        full = self.joint_max_probability(model, range(1, n + 1), threshold)
        return BoundCheck(average=float(average), bound=float(full) ** (r / n))

    def subset_average(self, model: BallsBinsModel, threshold: int, r: int) -> Fraction:
        subsets = list(combinations(range(1, model.bins + 1), r))
        total = sum(self.joint_max_probability(model, s, threshold) for s in subsets)
        return total / len(subsets)

    def lemma2_holds_exactly(self, model: BallsBinsModel, threshold: int, r: int) -> bool:
        """average^n >= Pr[max over [n] <= T]^r in rational arithmetic"""
        n = model.bins
        average = self.subset_average(model, threshold, r)
        full = self.joint_max_probability(model, range(1, n + 1), threshold)
        return average ** n >= full ** r

    # ============ Augmented thresholds for counts ============
    def max_count_cdf(self, model: BallsBinsModel, t: int) -> Fraction:
        """Pr[max count <= t]"""
        if t < 0:
            return Fraction(0)
        return self.capped_size_probability(model, model.bins, t)

    def augmented_count_polynomial(self, model: BallsBinsModel, t: int) -> List[Fraction]:
        """
        Coefficients q_k with Pr[max_lex (count_i, U_i) <= (t, u)] = sum_k q_k u^k,
        q_k = Pr[exactly k bins hold t balls and all others fewer].
        """
        m, n = model.balls, model.bins
        ResourceGuard.check_counting_dp(m, n, t)
        coefficients = []
        for k in range(n + 1):
            rest = m - k * t
            if rest < 0:
                coefficients.append(Fraction(0))
                continue
            placed = math.factorial(m) // (math.factorial(t) ** k * math.factorial(rest))
            remaining = capped_ways(n - k, rest, t - 1)[rest]
            coefficients.append(Fraction(math.comb(n, k) * placed * remaining, n ** m))
        return coefficients

    def augmented_count_threshold(self, model: BallsBinsModel, p: float) -> AugmentedValue:
        """Exact lexicographic quantile: smallest (t, u) with Pr[max_lex <= (t, u)] = p"""
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"Probability outside [0, 1]: {p}")
        t = next(t for t in range(model.balls + 1) if self.max_count_cdf(model, t) >= p)
        coefficients = np.array([float(q) for q in self.augmented_count_polynomial(model, t)])

        def excess(u: float) -> float:
            return float(np.polynomial.polynomial.polyval(u, coefficients)) - p

        if excess(0.0) >= 0.0:
            return AugmentedValue(float(t), 0.0)
        if excess(1.0) <= 0.0:
            return AugmentedValue(float(t), 1.0)
        return AugmentedValue(float(t), float(brentq(excess, 0.0, 1.0, xtol=settings.QUANTILE_TOL)))

    def interpolated_count_threshold(self, model: BallsBinsModel, p: float) -> AugmentedValue:
        """
        (t, u*) with u* interpolating linearly between Pr[max <= t-1] and Pr[max <= t]

        Approximation kept for comparison only: with no balls it gives u* = d^n
        where the exact augmented quantile gives d.
        """
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"Probability outside [0, 1]: {p}")
        t = next(t for t in range(model.balls + 1) if self.max_count_cdf(model, t) >= p)
        below, at = float(self.max_count_cdf(model, t - 1)), float(self.max_count_cdf(model, t))
        u = 0.0 if at <= below else min(1.0, max(0.0, (p - below) / (at - below)))
        return AugmentedValue(float(t), u)

    def count_thresholds(self, model: BallsBinsModel, method: str = "exact") -> Thresholds:
        d = decision_service.optimal_decision_numbers(model.bins)
        n = model.bins
        if method == "exact":
            solve = self.augmented_count_threshold
        elif method == "interpolated":
            solve = self.interpolated_count_threshold
        else:
            raise DomainError(f"Unknown threshold method {method!r}")
        return Thresholds.from_values([solve(model, d_i ** n) for d_i in d.values])

    def simulate_balls_bins_secretary(
        self,
        model: BallsBinsModel,
        trials: int,
        seed: int,
        workers: Optional[int] = None,
        method: str = "exact",
    ) -> SimulationResult:
        """Blind policy over bins presented in random order; win iff the augmented maximum is picked."""
        if trials < 1:
            raise DomainError(f"trials must be positive, got {trials}")
        thresholds = self.count_thresholds(model, method)
        d = decision_service.optimal_decision_numbers(model.bins)
        tasks = [(model, thresholds, seed, block, rows) for block, rows in block_layout(trials)]
        logger.info(f"Balls-and-bins secretary: m={model.balls}, n={model.bins}, trials={trials}")
        results = run_blocks(_count_block_wins, tasks, workers or settings.WORKERS)
        return SimulationResult.from_counts(
            n=model.bins,
            mode="balls-and-bins",
            trials=trials,
            wins=sum(r[0] for r in results),
            reference_bound=decision_service.success_probability(d),
        )


# Create singleton instance
negdep_service = NegDepService()
