"""
One-dimensional distributions

Every variant exposes a right-continuous ``cdf``, its left limit ``cdf_left``,
the generalized inverse ``quantile`` (inf{x : cdf(x) >= p}) and inverse-transform
sampling. Variants are pydantic models discriminated by ``kind`` so experiment
configs parse straight into them.
"""
from typing import Annotated, List, Literal, NamedTuple, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, TypeAdapter, model_validator

from app.core.exceptions import DomainError
from app.core.random_streams import RandomStream


class AugmentedValue(NamedTuple):
    """A value paired with a uniform tiebreak; tuples order lexicographically."""

    primary: float
    tiebreak: float = 0.0


def _check_probability(p):
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"Probability outside [0, 1]: {p}")
    return arr


def _scalar_or_array(result, like):
    return float(result) if np.ndim(like) == 0 else result


class DistributionBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    def __eq__(self, other):
        # fields only; private step arrays are derived from them
        if not isinstance(other, DistributionBase):
            return NotImplemented
        return type(self) is type(other) and self.model_dump() == other.model_dump()

    __hash__ = None

    def cdf(self, x):
        """Pr[X <= x]"""
        raise NotImplementedError

    def cdf_left(self, x):
        """Pr[X < x]"""
        return self.cdf(x)

    def quantile(self, p):
        raise NotImplementedError

    def support(self) -> Tuple[float, float]:
        raise NotImplementedError

    def atoms(self) -> np.ndarray:
        return np.empty(0)

    @property
    def is_continuous(self) -> bool:
        return True

    def sample(self, rng: RandomStream, size=None):
        """Inverse-transform draw(s); consumes ``size`` uniforms from ``rng``."""
        return self.quantile(rng.random(size))


class Uniform(DistributionBase):
    kind: Literal["uniform"] = "uniform"
    lo: float = 0.0
    hi: float = 1.0

    @model_validator(mode="after")
    def _check_bounds(self):
        if not self.lo < self.hi:
            raise ValueError(f"uniform requires lo < hi, got lo={self.lo}, hi={self.hi}")
        return self

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.clip((x_arr - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return _scalar_or_array(out, x)

    def quantile(self, p):
        p_arr = _check_probability(p)
        out = self.lo + p_arr * (self.hi - self.lo)
        return _scalar_or_array(out, p)

    def support(self) -> Tuple[float, float]:
        return self.lo, self.hi


class Exponential(DistributionBase):
    kind: Literal["exponential"] = "exponential"
    rate: float = Field(1.0, gt=0)

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        out = np.where(x_arr > 0.0, -np.expm1(-self.rate * np.maximum(x_arr, 0.0)), 0.0)
        return _scalar_or_array(out, x)

    def quantile(self, p):
        p_arr = _check_probability(p)
        with np.errstate(divide="ignore"):
            out = -np.log1p(-p_arr) / self.rate
        return _scalar_or_array(out, p)

    def support(self) -> Tuple[float, float]:
        return 0.0, float("inf")


class _StepDistribution(DistributionBase):
    """Shared machinery for laws supported on finitely many atoms."""

    _values: np.ndarray = PrivateAttr(default=None)
    _cum: np.ndarray = PrivateAttr(default=None)

    def _set_steps(self, values: np.ndarray, cum: np.ndarray) -> None:
        cum = np.minimum(cum, 1.0)
        cum[-1] = 1.0
        self._values = values
        self._cum = cum

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._values, x_arr, side="right") - 1
        out = np.where(idx >= 0, self._cum[np.maximum(idx, 0)], 0.0)
        return _scalar_or_array(out, x)

    def cdf_left(self, x):
        x_arr = np.asarray(x, dtype=float)
        idx = np.searchsorted(self._values, x_arr, side="left") - 1
        out = np.where(idx >= 0, self._cum[np.maximum(idx, 0)], 0.0)
        return _scalar_or_array(out, x)

    def quantile(self, p):
        p_arr = _check_probability(p)
        idx = np.searchsorted(self._cum, p_arr, side="left")
        out = self._values[np.minimum(idx, len(self._values) - 1)]
        return _scalar_or_array(out, p)

    def atoms(self) -> np.ndarray:
        return self._values

    @property
    def is_continuous(self) -> bool:
        return False

    def support(self) -> Tuple[float, float]:
        masses = np.diff(np.concatenate(([0.0], self._cum)))
        charged = self._values[masses > 0]
        return float(charged[0]), float(charged[-1])


class Discrete(_StepDistribution):
    kind: Literal["discrete"] = "discrete"
    values: List[float] = Field(..., min_length=1)
    probs: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_masses(self):
        if not self.values or len(self.values) != len(self.probs):
            raise ValueError("discrete requires nonempty values and probs of equal length")
        if any(p < 0 for p in self.probs):
            raise ValueError("discrete probabilities must be nonnegative")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"discrete probabilities sum to {sum(self.probs)}, expected 1")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("discrete values must be strictly increasing")
        return self

    def model_post_init(self, __context):
        self._set_steps(np.asarray(self.values, dtype=float), np.cumsum(self.probs))


class Empirical(_StepDistribution):
    kind: Literal["empirical"] = "empirical"
    samples: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _check_sorted(self):
        if not self.samples:
            raise ValueError("empirical requires at least one sample")
        if any(b < a for a, b in zip(self.samples, self.samples[1:])):
            raise ValueError("empirical samples must be sorted nondecreasing")
        return self

    def model_post_init(self, __context):
        values, counts = np.unique(np.asarray(self.samples, dtype=float), return_counts=True)
        # integer cumulative counts keep cdf and quantile on identical floats
        self._set_steps(values, np.cumsum(counts) / len(self.samples))


Distribution = Annotated[
    Union[Uniform, Exponential, Discrete, Empirical],
    Field(discriminator="kind"),
]

distribution_adapter = TypeAdapter(Distribution)
