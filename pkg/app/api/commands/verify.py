import argparse
import json
import logging

from app.api.deps import get_seed, seed_option
from app.api.router import CommandRouter, Option
from app.services.verification_service import verification_service

logger = logging.getLogger(__name__)

router = CommandRouter()


@router.command(
    "verify",
    options=[
        Option.of("--suite", required=True, choices=verification_service.suites, help="invariant suite"),
        seed_option,
    ],
)
def cmd_verify(args: argparse.Namespace) -> int:
    """Run an invariant suite; exit 1 and print the violating instances on failure"""
    seed = get_seed(args)
    report = verification_service.run(args.suite, seed)
    summary = report.model_dump(mode="json")
    summary["passed"] = report.passed
    summary["seed"] = seed
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if report.passed else 1
