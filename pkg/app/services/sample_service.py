"""
Sample Service
Order-statistic thresholds from samples, sample-size planning, and the
sample-based blind policy.
"""
import logging
import math
from typing import Sequence

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError, InsufficientSamplesError
from app.models.models import SamplePolicy, SampleSet, Thresholds
from app.schemas.schemas import EstimationParams
from app.services.decision_service import decision_service

logger = logging.getLogger(__name__)


class SampleService:
    """Threshold estimation when only samples of the distributions are known"""

    # ============ Tuning functions of the sample-based pipeline ============
    @staticmethod
    def tail_fraction(epsilon: float) -> float:
        """f1: fraction of final positions never accepted"""
        return settings.TAIL_FACTOR * epsilon

    @staticmethod
    def failure_probability(epsilon: float) -> float:
        """f2: allowed probability that estimated thresholds are off"""
        return settings.FAILURE_FACTOR * epsilon

    @staticmethod
    def accuracy_factor(epsilon: float) -> float:
        """f3: multiplicative accuracy of Pr[max <= T_i] around d_i^n"""
        return -epsilon / (settings.ACCURACY_FACTOR * math.log(epsilon))

    def derived_params(self, epsilon: float) -> EstimationParams:
        """Bucket ratio f3/4, floor delta = e^{-c/f1}, failure f2."""
        if not 0.0 < epsilon < 1.0:
            raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
        c = decision_service.solve_c()
        delta = max(math.exp(-c / self.tail_fraction(epsilon)), settings.DELTA_FLOOR)
        return EstimationParams(
            epsilon=self.accuracy_factor(epsilon) / 4.0,
            delta=delta,
            eta=min(self.failure_probability(epsilon), 0.999),
        )

    # ============ Lemma operations ============
    @staticmethod
    def bucket_index(p: float, epsilon: float) -> int:
        """k with p in [(1+eps)^-k, (1+eps)^-(k-1)); p < 1."""
        ratio = 1.0 + epsilon
        k = max(1, math.ceil(-math.log(p) / math.log(ratio) - 1e-12))
        while ratio ** (-k) > p:
            k += 1
        while k > 1 and ratio ** (-(k - 1)) <= p:
            k -= 1
        return k

    def empirical_thresholds(
        self,
        samples: SampleSet,
        p: Sequence[float],
        params: EstimationParams
    ) -> np.ndarray:
        """
        T_i = M_k, the floor(m / (1+eps)^k)-th smallest sample, for the bucket k
        holding p_i; p_i = 1 maps to the largest sample.
        """
        ratio = 1.0 + params.epsilon
        m = samples.m
        out = np.empty(len(p), dtype=float)
        for i, p_i in enumerate(p):
            if not params.delta < p_i <= 1.0:
                raise DomainError(f"p_{i + 1}={p_i} must lie in (delta={params.delta}, 1]")
            if p_i == 1.0:
                out[i] = samples.values[-1]
                continue
            k = self.bucket_index(p_i, params.epsilon)
            m_k = math.floor(m * ratio ** (-k) + 1e-9)
            if m_k < 1:
                raise InsufficientSamplesError(
                    f"Bucket {k} needs at least {math.ceil(ratio ** k)} samples, have {m}",
                    required=math.ceil(ratio ** k),
                )
            out[i] = samples.values[m_k - 1]
        return out

    def required_sample_size(self, params: EstimationParams) -> int:
        """
        Smallest m with 2(L + 2) exp(-eps^2 delta m / (3 (1+eps)^2)) <= eta,
        L = -ln(delta) / ln(1 + eps). Independent of the horizon.
        """
        eps, delta = params.epsilon, params.delta
        buckets = -math.log(delta) / math.log1p(eps)
        log_term = math.log(2.0 * (buckets + 2.0) / params.eta)
        if log_term <= 0.0:
            return 1
        m = 3.0 * (1.0 + eps) ** 2 / (eps * eps * delta) * log_term
        return max(1, math.ceil(m))

    def max_samples_from_rows(self, table) -> SampleSet:
        """Row-wise maxima of an m x n table: m samples of the max-distribution."""
        try:
            arr = np.asarray(table, dtype=float)
        except ValueError as exc:
            raise DomainError(f"Sample table is ragged: {exc}") from exc
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.size == 0:
            raise DomainError(f"Sample table must be a nonempty m x n matrix, got shape {arr.shape}")
        return SampleSet(np.sort(arr.max(axis=1)))

    # ============ Sample-based pipeline ============
    @staticmethod
    def skip_count_for_fraction(n: int, fraction: float) -> int:
        """Number of positions i > (1 - fraction) n; at least one position is kept."""
        return min(n - 1, math.floor(fraction * n + 1e-9))

    def skip_count(self, n: int, epsilon: float) -> int:
        return self.skip_count_for_fraction(n, self.tail_fraction(epsilon))

    def sample_based_policy(self, n: int, epsilon: float, table, strict: bool = True) -> SamplePolicy:
        """
        Estimate thresholds for the optimal decision numbers from an m x n table
        of per-distribution samples, skipping the final f1(eps) fraction.
        """
        params = self.derived_params(epsilon)
        required = self.required_sample_size(params)
        samples = self.max_samples_from_rows(table)
        if samples.m < required:
            message = (
                f"{samples.m} sample rows supplied; the planner asks for {required} "
                f"(inner epsilon={params.epsilon:.3g}, delta={params.delta:.3g})"
            )
            if strict:
                raise InsufficientSamplesError(message, required=required)
            logger.warning(message)

        d = decision_service.optimal_decision_numbers(n)
        p = d.as_array() ** n
        accept_mask = np.ones(n, dtype=bool)
        accept_mask[n - self.skip_count(n, epsilon):] = False

        # p_i <= delta lies below every bucket: such positions take the smallest sample
        primary = np.full(n, samples.values[0])
        estimated = np.flatnonzero(accept_mask & (p > params.delta))
        primary[estimated] = self.empirical_thresholds(samples, p[estimated].tolist(), params)

        skipped = [int(i) + 1 for i in np.flatnonzero(~accept_mask)]
        logger.info(f"Sample-based policy: m={samples.m}, estimated={len(estimated)}, skipped={skipped}")
        return SamplePolicy(
            thresholds=Thresholds(primary=primary, tiebreak=np.zeros(n)),
            accept_mask=accept_mask,
            required_samples=required,
            inner_epsilon=params.epsilon,
            delta=params.delta,
            tail_fraction=self.tail_fraction(epsilon),
            skipped=skipped,
        )


# Create singleton instance
sample_service = SampleService()
