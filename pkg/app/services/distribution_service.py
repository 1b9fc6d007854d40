"""
Distribution Service
Product-max CDF/quantile of independent laws and augmented (lexicographic) thresholds
"""
import logging
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from app.core.config import settings
from app.core.exceptions import DomainError
from app.core.random_streams import RandomStream
from app.models.distributions import AugmentedValue, DistributionBase

logger = logging.getLogger(__name__)


class DistributionService:
    """Operations on ordered lists of independent distributions"""

    def __init__(self):
        self.tol = settings.QUANTILE_TOL
        self.max_doublings = settings.BRACKET_MAX_DOUBLINGS

    @staticmethod
    def _require_nonempty(dists: Sequence[DistributionBase]) -> None:
        if not dists:
            raise DomainError("product-max needs at least one distribution")

    def product_max_cdf(self, dists: Sequence[DistributionBase], x):
        """Pr[max_k X_k <= x] = prod_k cdf_k(x)"""
        self._require_nonempty(dists)
        out = np.ones_like(np.asarray(x, dtype=float))
        for dist in dists:
            out = out * np.asarray(dist.cdf(x), dtype=float)
        return float(out) if np.ndim(x) == 0 else out

    def product_max_cdf_left(self, dists: Sequence[DistributionBase], x: float) -> float:
        """Pr[max_k X_k < x]"""
        self._require_nonempty(dists)
        return float(np.prod([dist.cdf_left(x) for dist in dists]))

    def joint_support_infimum(self, dists: Sequence[DistributionBase]) -> float:
        return max(dist.support()[0] for dist in dists)

    def product_max_quantile(self, dists: Sequence[DistributionBase], p: float) -> float:
        """
        inf{x : product_max_cdf(x) >= p}

        Brackets by doubling from the joint support, then bisects until the bracket
        is narrower than QUANTILE_TOL in x (absolute), or floats cannot split it.
        A bracket that closes around an atom of a discrete component snaps to it.
        """
        self._require_nonempty(dists)
        if np.isnan(p) or p < 0.0 or p > 1.0:
            raise DomainError(f"Probability outside [0, 1]: {p}")

        first = dists[0]
        if all(d == first for d in dists[1:]):
            # IID: F(x)^n >= p iff F(x) >= p^(1/n)
            return float(first.quantile(p ** (1.0 / len(dists))))

        lo = self.joint_support_infimum(dists)
        if p == 0.0 or self.product_max_cdf(dists, lo) >= p:
            return lo

        hi = max(dist.support()[1] for dist in dists)
        if p == 1.0 and not np.isfinite(hi):
            return float("inf")
        if not np.isfinite(hi) or self.product_max_cdf(dists, hi) < p:
            width = 1.0
            hi = lo + width
            for _ in range(self.max_doublings):
                if self.product_max_cdf(dists, hi) >= p:
                    break
                lo, width = hi, 2.0 * width
                hi = lo + width
            else:
                raise DomainError(f"Could not bracket the product-max quantile at p={p}")

        # invariant: cdf(lo) < p <= cdf(hi)
        while hi - lo > self.tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.product_max_cdf(dists, mid) >= p:
                hi = mid
            else:
                lo = mid

        atoms = np.concatenate([dist.atoms() for dist in dists])
        inside = atoms[(atoms > lo) & (atoms <= hi)]
        if inside.size:
            return float(inside.min())
        return float(hi)

    def augmented_product_max_quantile(self, dists: Sequence[DistributionBase], p: float) -> AugmentedValue:
        """
        Lexicographic threshold (t, u) with Pr[max_k (X_k, U_k) <=lex (t, u)] = p

        Each X_k is paired with an independent U_k ~ Uniform(0, 1), so
        Pr[(X_k, U_k) <=lex (t, u)] = F_k(t-) + u * (F_k(t) - F_k(t-)).
        Continuous laws get tiebreak 0.
        """
        t = self.product_max_quantile(dists, p)
        left = np.array([dist.cdf_left(t) for dist in dists], dtype=float)
        right = np.array([dist.cdf(t) for dist in dists], dtype=float)
        jumps = right - left
        if np.all(jumps <= 0.0):
            return AugmentedValue(t, 0.0)

        def excess(u: float) -> float:
            return float(np.prod(left + u * jumps)) - p

        if excess(0.0) >= 0.0:
            return AugmentedValue(t, 0.0)
        if excess(1.0) <= 0.0:
            return AugmentedValue(t, 1.0)
        u = brentq(excess, 0.0, 1.0, xtol=self.tol)
        return AugmentedValue(t, float(u))

    def sample(self, dist: DistributionBase, rng: RandomStream, size=None):
        return dist.sample(rng, size)

    def sample_columns(self, dists: Sequence[DistributionBase], rng: RandomStream, rows: int) -> np.ndarray:
        """rows x n matrix, column k drawn from dists[k], columns consumed in order."""
        return np.column_stack([dist.sample(rng, rows) for dist in dists])


# Create singleton instance
distribution_service = DistributionService()
