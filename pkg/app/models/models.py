"""
Value types shared across services
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterator, List, Optional, Union

import numpy as np

from app.core.exceptions import DomainError
from app.models.distributions import AugmentedValue


# ============ Decision Numbers ============
@dataclass(frozen=True)
class DecisionNumbers:
    """d_1 >= d_2 >= ... >= d_n in [0, 1]; thresholds satisfy Pr[max <= tau_i] = d_i^n."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise DomainError("decision numbers need a horizon n >= 1")
        if any(v < 0.0 or v > 1.0 or np.isnan(v) for v in vals):
            raise DomainError(f"decision numbers must lie in [0, 1]: {vals}")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise DomainError(f"decision numbers must be nonincreasing: {vals}")

    @property
    def horizon(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class LimitConstants:
    c: float
    gamma: float


# ============ Policy ============
@dataclass(frozen=True)
class Thresholds:
    """tau_1 >= ... >= tau_n, stored as primaries plus lexicographic tiebreaks."""

    primary: np.ndarray
    tiebreak: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.primary)

    def __getitem__(self, i: int) -> AugmentedValue:
        return AugmentedValue(float(self.primary[i]), float(self.tiebreak[i]))

    def __iter__(self) -> Iterator[AugmentedValue]:
        return (self[i] for i in range(self.horizon))

    @classmethod
    def from_values(cls, values) -> "Thresholds":
        augmented = [v if isinstance(v, tuple) else AugmentedValue(float(v)) for v in values]
        return cls(
            primary=np.array([a.primary for a in augmented], dtype=float),
            tiebreak=np.array([a.tiebreak for a in augmented], dtype=float),
        )


@dataclass
class PolicyState:
    """Running-maximum record of one episode (single owner)."""

    step: int = 0
    best: Optional[AugmentedValue] = None


@dataclass(frozen=True)
class EpisodeOutcome:
    picked: Optional[int]
    argmax: int

    @property
    def win(self) -> bool:
        return self.picked is not None and self.picked == self.argmax


@dataclass(frozen=True)
class BoundCheck:
    """An (average, bound) pair whose contract is average >= bound."""

    average: float
    bound: float

    def holds(self, slack: float = 1e-12) -> bool:
        return self.average >= self.bound - slack

    def __iter__(self):
        return iter((self.average, self.bound))


# ============ Balls and Bins ============
@dataclass(frozen=True)
class BallsBinsModel:
    balls: int
    bins: int

    def __post_init__(self):
        if self.balls < 0 or self.bins < 1:
            raise DomainError(f"balls-and-bins needs m >= 0 and n >= 1, got m={self.balls}, n={self.bins}")


class _Impossible:
    """log of probability zero; compares below every real."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "IMPOSSIBLE"

    def __reduce__(self):
        return (_Impossible, ())


IMPOSSIBLE = _Impossible()

LogProbability = Union[float, _Impossible]


@dataclass
class SubsetLogTable:
    """g(A) = log Pr[max over A <= T] for every subset A of [n]."""

    n: int
    threshold: int
    values: Dict[FrozenSet[int], LogProbability]
    exact: Optional[Dict[FrozenSet[int], Fraction]] = None

    def __getitem__(self, subset) -> LogProbability:
        return self.values[frozenset(subset)]

    @property
    def ground_set(self) -> FrozenSet[int]:
        return frozenset(range(1, self.n + 1))


# ============ Samples ============
@dataclass(frozen=True)
class SampleSet:
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("a sample set needs at least one value")
        if np.any(np.diff(arr) < 0):
            arr = np.sort(arr)
        object.__setattr__(self, "values", arr)

    @property
    def m(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SamplePolicy:
    """Thresholds estimated from samples plus the never-accept tail."""

    thresholds: Thresholds
    accept_mask: np.ndarray
    required_samples: int
    inner_epsilon: float
    delta: float
    tail_fraction: float
    skipped: List[int] = field(default_factory=list)
