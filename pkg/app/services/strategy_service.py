"""
Strategy Service
Thresholds from decision numbers and the online blind policy
"""
import math
from typing import Optional, Sequence, Union

import numpy as np

from app.core.exceptions import DomainError, UsageError
from app.models.distributions import AugmentedValue, DistributionBase
from app.models.models import DecisionNumbers, EpisodeOutcome, PolicyState, Thresholds
from app.services.distribution_service import distribution_service

Observation = Union[float, AugmentedValue]


def as_augmented(value: Observation) -> AugmentedValue:
    if isinstance(value, AugmentedValue):
        return value
    if isinstance(value, tuple):
        return AugmentedValue(*value)
    return AugmentedValue(float(value), 0.0)


class StrategyService:
    """Blind threshold rule: accept the running maximum when it beats tau_i"""

    def thresholds_from_decision_numbers(
        self,
        dists: Sequence[DistributionBase],
        d: DecisionNumbers
    ) -> Thresholds:
        """tau_i = product-max quantile at d_i^n, in lexicographic space."""
        n = d.horizon
        if len(dists) != n:
            raise DomainError(f"Got {len(dists)} distributions for a horizon of {n}")
        taus = [
            distribution_service.augmented_product_max_quantile(dists, d_i ** n)
            for d_i in d.values
        ]
        return Thresholds.from_values(taus)

    def policy_step(
        self,
        state: PolicyState,
        i: int,
        observation: Observation,
        thresholds: Thresholds
    ) -> bool:
        """
        Accept observation i (1-based) iff it beats the running maximum and tau_i,
        both strictly and lexicographically. Updates ``state`` in place.
        """
        if i != state.step + 1 or i > thresholds.horizon:
            raise UsageError(f"Expected step {state.step + 1}, got step {i}")
        value = as_augmented(observation)
        is_running_max = state.best is None or value > state.best
        accept = is_running_max and value > thresholds[i - 1]
        state.step = i
        if is_running_max:
            state.best = value
        return accept

    def run_episode(self, draws: Sequence[Observation], thresholds: Thresholds) -> EpisodeOutcome:
        if len(draws) != thresholds.horizon:
            raise DomainError(f"Got {len(draws)} draws for a horizon of {thresholds.horizon}")
        values = [as_augmented(v) for v in draws]
        argmax = max(range(len(values)), key=values.__getitem__) + 1

        state = PolicyState()
        picked: Optional[int] = None
        for i, value in enumerate(values, start=1):
            if self.policy_step(state, i, value, thresholds):
                picked = i
                break
        return EpisodeOutcome(picked=picked, argmax=argmax)

    @staticmethod
    def observation_phase(n: int) -> int:
        """Length of the classical observe-only prefix, ceil(n / e)."""
        return math.ceil(n / math.e)

    def classical_baseline(self, draws: Sequence[Observation]) -> EpisodeOutcome:
        """
        Classical 1/e rule: observe ceil(n/e) draws, then take the first running
        maximum; the last draw is taken when nothing qualifies.
        """
        n = len(draws)
        if n < 1:
            raise DomainError("classical baseline needs at least one draw")
        values = [as_augmented(v) for v in draws]
        argmax = max(range(n), key=values.__getitem__) + 1
        k = self.observation_phase(n)

        best = max(values[:k]) if k else None
        for i in range(k, n):
            if best is None or values[i] > best:
                return EpisodeOutcome(picked=i + 1, argmax=argmax)
        return EpisodeOutcome(picked=n, argmax=argmax)

    # ============ Vectorized episodes ============
    @staticmethod
    def lexicographic_ranks(primary: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
        """Integer ranks of (primary, tiebreak) pairs preserving lexicographic order."""
        order = np.lexsort((tiebreak.ravel(), primary.ravel()))
        ranks = np.empty(order.size, dtype=np.int64)
        ranks[order] = np.arange(order.size)
        return ranks.reshape(primary.shape)

    def batch_wins(
        self,
        primary: np.ndarray,
        tiebreak: np.ndarray,
        thresholds: Thresholds,
        accept_mask: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """
        Win indicator of the blind policy for each row of presented values.
        Rows are episodes, columns presentation positions.
        """
        ranks = self.lexicographic_ranks(primary, tiebreak)
        running = np.maximum.accumulate(ranks, axis=1)
        previous = np.concatenate(
            [np.full((ranks.shape[0], 1), -1, dtype=np.int64), running[:, :-1]], axis=1
        )
        is_running_max = ranks > previous

        tau_p = thresholds.primary[None, :]
        tau_t = thresholds.tiebreak[None, :]
        above = (primary > tau_p) | ((primary == tau_p) & (tiebreak > tau_t))

        accept = is_running_max & above
        if accept_mask is not None:
            accept &= accept_mask[None, :]
        any_accept = accept.any(axis=1)
        first = accept.argmax(axis=1)
        return any_accept & (first == ranks.argmax(axis=1))

    def batch_classical_wins(self, primary: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
        ranks = self.lexicographic_ranks(primary, tiebreak)
        rows, n = ranks.shape
        k = self.observation_phase(n)
        if k >= n:
            return ranks.argmax(axis=1) == n - 1
        best = ranks[:, :k].max(axis=1) if k else np.full(rows, -1, dtype=np.int64)
        later = ranks[:, k:] > best[:, None]
        picked = np.where(later.any(axis=1), k + later.argmax(axis=1), n - 1)
        return picked == ranks.argmax(axis=1)


# Create singleton instance
strategy_service = StrategyService()
