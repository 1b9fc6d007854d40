import logging
import math
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import norm

from app.core.config import settings
from app.models.distributions import Distribution

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


# ============ Estimation Schemas ============
class EstimationParams(BaseModel):
    """Lemma-style sample estimation: bucket ratio epsilon, floor delta, failure eta."""

    epsilon: float = Field(..., gt=0, lt=1)
    delta: float = Field(..., gt=0, lt=1)
    eta: float = Field(0.05, gt=0, lt=1)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _warn_outside_regime(self):
        if self.epsilon >= 0.1:
            logger.warning(
                f"epsilon={self.epsilon} is outside the proven regime epsilon < 0.1; "
                "the quantile sandwich is not guaranteed"
            )
        return self


# ============ Experiment Schemas ============
class ExperimentConfig(BaseModel):
    distributions: List[Distribution] = Field(..., min_length=1)
    trials: int = Field(..., ge=1)
    seed: int = Field(settings.DEFAULT_SEED, ge=0, le=MAX_SEED)
    mode: Literal["full-knowledge", "sample-based"] = "full-knowledge"
    epsilon: Optional[float] = Field(None, gt=0, lt=1)
    samples_per_dist: Optional[int] = Field(None, ge=1)
    samples_csv: Optional[str] = None
    strict_sample_size: bool = True
    decision_numbers: Optional[List[float]] = None
    include_baseline: bool = False

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_mode(self):
        sample_fields = (self.epsilon, self.samples_per_dist, self.samples_csv)
        if self.mode == "sample-based":
            if self.epsilon is None:
                raise ValueError("sample-based mode requires epsilon")
            if self.samples_per_dist is None and self.samples_csv is None:
                raise ValueError("sample-based mode requires samples_per_dist or samples_csv")
            if self.decision_numbers is not None:
                raise ValueError("decision_numbers override is only valid in full-knowledge mode")
        elif any(field is not None for field in sample_fields):
            raise ValueError("epsilon, samples_per_dist and samples_csv are only valid in sample-based mode")
        if self.decision_numbers is not None and len(self.decision_numbers) != self.n:
            raise ValueError(
                f"decision_numbers has {len(self.decision_numbers)} entries for {self.n} distributions"
            )
        return self

    @property
    def n(self) -> int:
        return len(self.distributions)


class SimulationResult(BaseModel):
    n: int
    mode: str
    trials: int = Field(..., ge=1)
    wins: int = Field(..., ge=0)
    rate: float
    stderr: float
    ci95_low: float
    ci95_high: float
    reference_bound: float
    classical_rate: Optional[float] = None

    @model_validator(mode="after")
    def _check_counts(self):
        if self.wins > self.trials:
            raise ValueError(f"wins={self.wins} exceeds trials={self.trials}")
        return self

    @classmethod
    def from_counts(cls, *, n: int, mode: str, trials: int, wins: int, reference_bound: float,
                    classical_rate: Optional[float] = None) -> "SimulationResult":
        """
        Binomial summary with a Wilson score 95% interval; stderr is the Wilson
        half-width over z, so it stays positive at rates 0 and 1.
        """
        rate = wins / trials
        z = float(norm.ppf(0.975))
        denom = 1.0 + z * z / trials
        centre = (rate + z * z / (2 * trials)) / denom
        half = z * math.sqrt(rate * (1 - rate) / trials + z * z / (4 * trials * trials)) / denom
        return cls(
            n=n,
            mode=mode,
            trials=trials,
            wins=wins,
            rate=rate,
            stderr=half / z,
            ci95_low=min(rate, max(0.0, centre - half)),
            ci95_high=max(rate, min(1.0, centre + half)),
            reference_bound=reference_bound,
            classical_rate=classical_rate,
        )


# ============ Manifest Schemas ============
class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any]
    seed: Optional[int] = None
    timestamp: datetime
    artifact_version: str = settings.ARTIFACT_VERSION
    # environment settings that change results (block seeding, tolerances, pipeline factors)
    settings: Dict[str, Any] = {}


# ============ Verification Schemas ============
class SuiteReport(BaseModel):
    suite: str
    checks: int = 0
    violations: List[Dict[str, Any]] = []
    metrics: Dict[str, float] = {}

    @property
    def passed(self) -> bool:
        return not self.violations
