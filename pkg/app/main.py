import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.api.commands import balls_bins, constants, decision_numbers, plan, simulate, sweep, verify
from app.api.router import CommandRouter
from app.core.config import settings
from app.core.exceptions import SecretaryError

logger = logging.getLogger(__name__)


def include_router(subparsers, router: CommandRouter) -> None:
    router.mount(subparsers)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Blind threshold rules for the secretary problem with known distributions",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help=f"(default {settings.LOG_LEVEL})")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Include routers
    include_router(subparsers, constants.router)
    include_router(subparsers, decision_numbers.router)
    include_router(subparsers, simulate.router)
    include_router(subparsers, verify.router)
    include_router(subparsers, sweep.router)
    include_router(subparsers, plan.router)
    include_router(subparsers, balls_bins.router)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Exit codes: 0 success, 1 verification failure, 2 usage/config/domain error,
    3 resource guard.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=str(args.log_level).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except SecretaryError as exc:
        logger.error(f"{args.command} failed: {exc.detail}")
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        logger.error(f"{args.command}: invalid configuration")
        print(f"error: invalid configuration\n{exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
