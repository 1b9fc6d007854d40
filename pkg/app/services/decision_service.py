"""
Decision Service
Decision numbers d_i, the exact success-probability formula of blind threshold
rules, and the limit constants c and gamma.
"""
import logging
import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from app.core.config import settings
from app.core.exceptions import DomainError
from app.models.models import DecisionNumbers, LimitConstants

logger = logging.getLogger(__name__)

# Powers of bases below this are taken in log space
_LOG_SPACE_BELOW = 1e-12


def _powers(base: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    """base[:, None] ** exponents[None, :] with zero bases mapped to 0."""
    base = np.asarray(base, dtype=float)[:, None]
    exponents = np.asarray(exponents, dtype=float)[None, :]
    direct = np.power(base, exponents)
    tiny = (base > 0.0) & (base < _LOG_SPACE_BELOW)
    if np.any(tiny):
        with np.errstate(divide="ignore", under="ignore"):
            logged = np.exp(exponents * np.log(np.where(tiny, base, 1.0)))
        direct = np.where(tiny, logged, direct)
    return direct


def exp_series(c: float, tol: float = settings.SERIES_TOL) -> float:
    """sum_{k>=1} c^k / (k * k!), the termwise integral of (e^x - 1)/x over [0, c]."""
    total, term, k = 0.0, 1.0, 0
    while True:
        k += 1
        term *= c / k  # c^k / k!
        contribution = term / k
        total += contribution
        if contribution < tol * max(total, 1.0) and k > c:
            return total


def exp1(x: float) -> float:
    """
    Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.

    Power series up to x = 1, modified Lentz continued fraction above.
    """
    if x <= 0.0:
        raise DomainError(f"E1 is defined for positive arguments, got {x}")
    if x <= 1.0:
        total, term, k = 0.0, 1.0, 0
        while True:
            k += 1
            term *= -x / k  # (-x)^k / k!
            contribution = term / k
            total += contribution
            if abs(contribution) < 1e-17 * abs(total):
                break
        return -np.euler_gamma - math.log(x) - total

    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10_000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h * math.exp(-x)


class DecisionService:
    """Success probability and optimal decision numbers of blind threshold rules"""

    def success_probability(self, d: DecisionNumbers) -> float:
        """
        Exact IID success probability (a lower bound for independent laws):

            (1 - d_1^n)/n + sum_{r=1}^{n-1} [ sum_{i<=r} (d_i^r/r - d_i^n/n)/(n-r) - d_{r+1}^n/n ]
        """
        if not isinstance(d, DecisionNumbers):
            d = DecisionNumbers(tuple(d))
        n = d.horizon
        values = d.as_array()
        if n == 1:
            return 1.0 - values[0]

        r = np.arange(1, n)
        pow_r = _powers(values, r)  # pow_r[i-1, r-1] = d_i^r
        pow_n = _powers(values, np.array([n]))[:, 0]

        # inner[i, r] = (d_i^r / r - d_i^n / n) / (n - r), kept only for i <= r
        inner = (pow_r / r[None, :] - pow_n[:, None] / n) / (n - r)[None, :]
        lower = np.arange(1, n + 1)[:, None] <= r[None, :]
        per_r = np.where(lower, inner, 0.0).sum(axis=0) - pow_n[1:] / n
        return float((1.0 - pow_n[0]) / n + per_r.sum())

    @staticmethod
    def _stationarity(x: float, steps_left: int) -> float:
        """
        Scaled partial derivative of the formula in d_{n-j}, j = steps_left:
        sum_{s=1}^{j} (x^{-s} - 1)/s - 1. Decreasing in x; independent of n.
        """
        s = np.arange(1, steps_left + 1, dtype=float)
        return float(np.sum(np.expm1(-s * math.log(x)) / s) - 1.0)

    @lru_cache(maxsize=None)
    def _decision_number(self, steps_left: int) -> float:
        if steps_left == 0:
            return 0.0
        lower = max(1.0 / (steps_left + 1), 1.0 - 3.0 / steps_left)
        return brentq(self._stationarity, lower, 1.0, args=(steps_left,), xtol=1e-15)

    def optimal_decision_numbers(self, n: int) -> DecisionNumbers:
        """
        Maximizer of ``success_probability`` for horizon n.

        The formula separates into one term per coordinate, so coordinate ascent
        converges in a single sweep; each coordinate is maximized exactly through
        the root of its (rescaled) partial derivative. d_{n-j} depends on j only.
        """
        if n < 1:
            raise DomainError(f"Horizon must be positive, got {n}")
        values = tuple(self._decision_number(n - i) for i in range(1, n + 1))
        return DecisionNumbers(values)

    def optimal_success_probability(self, n: int) -> float:
        return self.success_probability(self.optimal_decision_numbers(n))

    @lru_cache(maxsize=1)
    def solve_c(self) -> float:
        """Root of sum_{k>=1} c^k/(k k!) = 1, i.e. int_0^c (e^x - 1)/x dx = 1."""
        return brentq(lambda c: exp_series(c) - 1.0, 0.5, 1.0, xtol=1e-15)

    def gamma_limit(self, c: float) -> float:
        """(e^c - c - 1) E1(c) + e^{-c}"""
        if c <= 0.0:
            raise DomainError(f"gamma_limit needs c > 0, got {c}")
        return float(math.expm1(c) - c) * exp1(c) + math.exp(-c)

    def limit_constants(self) -> LimitConstants:
        c = self.solve_c()
        return LimitConstants(c=c, gamma=self.gamma_limit(c))


# Create singleton instance
decision_service = DecisionService()
