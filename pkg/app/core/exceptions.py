"""
Error hierarchy

Every error carries the process exit code the CLI reports for it:
0 success, 1 verification failure, 2 usage/config/domain error, 3 resource guard.
"""
from typing import Optional


class SecretaryError(Exception):
    """Base error with an exit code and a human readable detail"""

    exit_code: int = 2

    def __init__(self, detail: str, exit_code: Optional[int] = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class DomainError(SecretaryError, ValueError):
    """Argument outside the mathematical domain of an operation"""


class UsageError(SecretaryError):
    """Operation called out of protocol (e.g. out-of-order policy step)"""


class ConfigError(SecretaryError):
    """Malformed experiment configuration or sample table"""


class InsufficientSamplesError(DomainError):
    """Not enough samples for the requested estimate"""

    def __init__(self, detail: str, required: int):
        super().__init__(detail)
        self.required = required


class ResourceGuardError(SecretaryError):
    exit_code = 3


class VerificationError(SecretaryError):
    exit_code = 1
