"""
Verification Service
Desk-scale invariant suites behind `verify --suite {lemma1,negdep,samples}`.
"""
import logging
from typing import Callable, Dict, Optional

from app.core.config import settings
from app.core.exceptions import UsageError
from app.core.random_streams import RandomStream
from app.models.models import BallsBinsModel, SampleSet
from app.schemas.schemas import EstimationParams, SuiteReport
from app.services.decision_service import decision_service
from app.services.negdep_service import negdep_service
from app.services.sample_service import sample_service
from app.services.simulation_service import simulation_service

logger = logging.getLogger(__name__)


class VerificationService:
    def __init__(self):
        self._suites: Dict[str, Callable[[int], SuiteReport]] = {
            "lemma1": self.lemma1_suite,
            "negdep": self.negdep_suite,
            "samples": self.samples_suite,
        }

    @property
    def suites(self):
        return sorted(self._suites)

    def run(self, suite: str, seed: Optional[int] = None) -> SuiteReport:
        if suite not in self._suites:
            raise UsageError(f"Unknown suite {suite!r}; choose from {', '.join(self.suites)}")
        seed = settings.DEFAULT_SEED if seed is None else seed
        logger.info(f"Running verification suite {suite} with seed={seed}")
        report = self._suites[suite](seed)
        if not report.passed:
            logger.error(f"Suite {suite}: {len(report.violations)} violation(s) in {report.checks} checks")
        return report

    def lemma1_suite(self, seed: int) -> SuiteReport:
        """Subset-average >= (prod a)^(r/n) on random probability vectors, every r."""
        report = SuiteReport(suite="lemma1")
        rng = RandomStream(seed, 0)
        for vector in range(settings.VERIFY_LEMMA1_VECTORS):
            n = 1 + int(rng.random() * settings.VERIFY_LEMMA1_MAX_N)
            a = [float(x) for x in rng.random(n)]
            for r in range(1, n + 1):
                check = simulation_service.lemma1_check(a, r)
                report.checks += 1
                if not check.holds():
                    report.violations.append(
                        {"vector": vector, "a": a, "r": r, "average": check.average, "bound": check.bound}
                    )
        return report

    def negdep_suite(self, seed: int) -> SuiteReport:
        """Submodularity, Han's inequality and the subset bound on every small model and T."""
        report = SuiteReport(suite="negdep")
        for m in range(1, settings.VERIFY_NEGDEP_MAX_BALLS + 1):
            for n in range(1, settings.VERIFY_NEGDEP_MAX_BINS + 1):
                model = BallsBinsModel(balls=m, bins=n)
                law = negdep_service.enumerate_joint_counts(model)
                for t in range(m + 1):
                    instance = {"m": m, "n": n, "T": t}
                    enumerated = sum(p for counts, p in law.items() if max(counts) <= t)
                    report.checks += 1
                    if enumerated != negdep_service.joint_max_probability(model, range(1, n + 1), t):
                        report.violations.append({**instance, "check": "dp-vs-enumeration"})

                    table = negdep_service.build_subset_log_table(model, t)
                    submodular = negdep_service.check_submodular(table)
                    report.checks += 1
                    if not submodular.holds:
                        a, b = submodular.violation
                        report.violations.append(
                            {**instance, "check": "submodular", "A": sorted(a), "B": sorted(b)}
                        )
                    for r in range(1, n + 1):
                        report.checks += 2
                        if not negdep_service.check_hans(table, r):
                            report.violations.append({**instance, "check": "hans", "r": r})
                        if not negdep_service.lemma2_holds_exactly(model, t, r):
                            report.violations.append({**instance, "check": "subset-bound", "r": r})
        return report

    def samples_suite(self, seed: int) -> SuiteReport:
        """
        Simultaneous quantile sandwich p/(1+eps)^2 <= F(T) <= p(1+eps) for
        Uniform(0, 1) samples at the planned sample size, over repetitions.
        """
        report = SuiteReport(suite="samples")
        params = EstimationParams(epsilon=0.1, delta=0.1, eta=0.05)
        m = sample_service.required_sample_size(params)
        n = 10
        p = [q for q in decision_service.optimal_decision_numbers(n).as_array() ** n if q > params.delta]
        ratio = 1.0 + params.epsilon

        hits = 0
        repetitions = settings.VERIFY_SAMPLES_REPETITIONS
        for rep in range(repetitions):
            samples = SampleSet(RandomStream(seed, rep).random(m))
            thresholds = sample_service.empirical_thresholds(samples, p, params)
            # Uniform(0, 1): F(T) = T
            hits += all(p_i / ratio ** 2 <= t_i <= p_i * ratio for p_i, t_i in zip(p, thresholds))
        rate = hits / repetitions
        report.checks = repetitions
        report.metrics = {"hit_rate": rate, "samples": float(m), "repetitions": float(repetitions)}
        if rate < settings.VERIFY_SAMPLES_MIN_HIT_RATE:
            report.violations.append(
                {"hit_rate": rate, "min_hit_rate": settings.VERIFY_SAMPLES_MIN_HIT_RATE, "seed": seed, "samples": m}
            )
        return report


# Create singleton instance
verification_service = VerificationService()
