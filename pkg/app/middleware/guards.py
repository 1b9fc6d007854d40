"""
Resource guards

Checks that keep exact computations within desk-scale limits. A failed check
raises ResourceGuardError (exit code 3).
"""
from functools import wraps

from app.core.config import settings
from app.core.exceptions import ResourceGuardError


class ResourceGuard:
    """
    Static guard checks, one per exact computation
    """

    @staticmethod
    def check_enumeration(bins: int, balls: int) -> None:
        if bins ** balls > settings.ENUMERATION_LIMIT:
            raise ResourceGuardError(
                f"Enumerating {bins}^{balls} outcomes exceeds the limit {settings.ENUMERATION_LIMIT}"
            )

    @staticmethod
    def check_counting_dp(balls: int, bins: int, cap: int) -> None:
        cost = max(balls, 1) * max(bins, 1) * (min(cap, balls) + 1)
        if cost > settings.DP_LIMIT:
            raise ResourceGuardError(
                f"Counting DP for m={balls}, bins={bins}, T={cap} exceeds the limit {settings.DP_LIMIT}"
            )

    @staticmethod
    def check_subset_table(bins: int) -> None:
        if bins > settings.SUBSET_TABLE_MAX_BINS:
            raise ResourceGuardError(
                f"A subset table over {bins} bins needs 2^{bins} entries; "
                f"limit is {settings.SUBSET_TABLE_MAX_BINS} bins"
            )

    @staticmethod
    def check_subset_enumeration(n: int) -> None:
        if n > settings.LEMMA1_MAX_N:
            raise ResourceGuardError(
                f"Exact subset enumeration is capped at n <= {settings.LEMMA1_MAX_N}, got n={n}"
            )


def guarded(check):
    """
    Decorator factory running ``check(*args, **kwargs)`` before the wrapped call

    Usage:
        @guarded(lambda a, r: ResourceGuard.check_subset_enumeration(len(a)))
        def lemma1_check(a, r): ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            check(*args, **kwargs)
            return func(*args, **kwargs)
        return wrapper
    return decorator
