"""
Simulation Service
Seeded Monte Carlo harness for the blind threshold policy.

Trials are grouped in fixed-size blocks; block b draws from RandomStream(seed, b)
with substreams 0 (draws), 1 (presentation order), 2 (tiebreaks). Results depend
on (seed, trials, block size) only, never on the worker count.
"""
import logging
import math
from itertools import combinations
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
from app.core.exceptions import DomainError
from app.core.random_streams import SAMPLE_STREAM_INDEX, RandomStream
from app.crud.artifacts import sample_table_crud
from app.middleware.guards import ResourceGuard, guarded
from app.models.distributions import DistributionBase
from app.models.models import BoundCheck, DecisionNumbers, Thresholds
from app.schemas.schemas import ExperimentConfig, SimulationResult
from app.services.decision_service import decision_service
from app.services.distribution_service import distribution_service
from app.services.sample_service import sample_service
from app.services.strategy_service import strategy_service

logger = logging.getLogger(__name__)

DRAWS, ORDER, TIEBREAKS = 0, 1, 2


def _block_wins(task) -> Tuple[int, int]:
    """Wins of the threshold policy (and optionally the classical rule) in one block."""
    dists, thresholds, accept_mask, seed, block, rows, classical = task
    stream = RandomStream(seed, block)
    n = len(dists)
    draws = distribution_service.sample_columns(dists, stream.substream(DRAWS), rows)
    order = stream.substream(ORDER).permuted_rows(rows, n)
    presented = np.take_along_axis(draws, order, axis=1)
    tiebreak = stream.substream(TIEBREAKS).random((rows, n))

    wins = int(strategy_service.batch_wins(presented, tiebreak, thresholds, accept_mask).sum())
    classical_wins = int(strategy_service.batch_classical_wins(presented, tiebreak).sum()) if classical else 0
    return wins, classical_wins


def run_blocks(worker, tasks: list, workers: int) -> list:
    """Map ``worker`` over ``tasks``; order of results matches order of tasks."""
    if workers <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with Pool(processes=min(workers, len(tasks))) as pool:
        return pool.map(worker, tasks)


def block_layout(trials: int, block_size: Optional[int] = None) -> List[Tuple[int, int]]:
    """(block index, rows) pairs covering ``trials`` trials."""
    size = block_size or settings.TRIAL_BLOCK_SIZE
    count = math.ceil(trials / size)
    return [(b, min(size, trials - b * size)) for b in range(count)]


class SimulationService:
    """Monte Carlo runs and exact small-instance oracles"""

    def random_permutation(self, n: int, rng: RandomStream) -> List[int]:
        """Uniform permutation of 1..n"""
        if n < 1:
            raise DomainError(f"Permutation length must be positive, got {n}")
        return [int(i) + 1 for i in rng.permutation(n)]

    def simulate_policy(
        self,
        dists: Sequence[DistributionBase],
        thresholds: Thresholds,
        trials: int,
        seed: int,
        *,
        accept_mask: Optional[np.ndarray] = None,
        classical: bool = False,
        workers: Optional[int] = None,
    ) -> Tuple[int, int]:
        """Total (policy wins, classical wins) over ``trials`` episodes."""
        if trials < 1:
            raise DomainError(f"trials must be positive, got {trials}")
        if thresholds.horizon != len(dists):
            raise DomainError(f"Got {thresholds.horizon} thresholds for {len(dists)} distributions")
        tasks = [
            (list(dists), thresholds, accept_mask, seed, block, rows, classical)
            for block, rows in block_layout(trials)
        ]
        results = run_blocks(_block_wins, tasks, workers or settings.WORKERS)
        return sum(r[0] for r in results), sum(r[1] for r in results)

    def _learning_table(self, config: ExperimentConfig) -> np.ndarray:
        if config.samples_csv:
            return sample_table_crud.read(config.samples_csv)
        stream = RandomStream(config.seed, SAMPLE_STREAM_INDEX)
        return distribution_service.sample_columns(config.distributions, stream, config.samples_per_dist)

    def run_experiment(self, config: ExperimentConfig, workers: Optional[int] = None) -> SimulationResult:
        dists = config.distributions
        n = config.n
        accept_mask = None

        if config.mode == "sample-based":
            table = self._learning_table(config)
            if table.shape[1] != n:
                raise DomainError(f"Sample table has {table.shape[1]} columns for {n} distributions")
            policy = sample_service.sample_based_policy(
                n, config.epsilon, table, strict=config.strict_sample_size
            )
            thresholds, accept_mask = policy.thresholds, policy.accept_mask
            constants = decision_service.limit_constants()
            reference = constants.gamma - config.epsilon
        else:
            if config.decision_numbers is not None:
                d = DecisionNumbers(tuple(config.decision_numbers))
            else:
                d = decision_service.optimal_decision_numbers(n)
            thresholds = strategy_service.thresholds_from_decision_numbers(dists, d)
            reference = decision_service.success_probability(d)

        logger.info(f"Running {config.trials} trials, n={n}, mode={config.mode}, seed={config.seed}")
        wins, classical_wins = self.simulate_policy(
            dists,
            thresholds,
            config.trials,
            config.seed,
            accept_mask=accept_mask,
            classical=config.include_baseline,
            workers=workers,
        )
        return SimulationResult.from_counts(
            n=n,
            mode=config.mode,
            trials=config.trials,
            wins=wins,
            reference_bound=reference,
            classical_rate=classical_wins / config.trials if config.include_baseline else None,
        )

    @guarded(lambda self, a, *args, **kwargs: ResourceGuard.check_subset_enumeration(len(a)))
    def lemma1_check(self, a: Sequence[float], r: int) -> BoundCheck:
        """
        (average over r-subsets of prod a, (prod a)^(r/n)) by exact enumeration;
        the average dominates by AM-GM.
        """
        n = len(a)
        if not 1 <= r <= n:
            raise DomainError(f"r must lie in 1..{n}, got {r}")
        if any(not 0.0 <= a_k <= 1.0 for a_k in a):
            raise DomainError(f"Entries must be probabilities: {list(a)}")
        total = math.fsum(math.prod(subset) for subset in combinations(a, r))
        average = total / math.comb(n, r)
        bound = math.prod(a) ** (r / n)
        return BoundCheck(average=average, bound=bound)


# Create singleton instance
simulation_service = SimulationService()
