import argparse

from app.api.router import CommandRouter
from app.services.decision_service import decision_service

router = CommandRouter()


@router.command("constants")
def cmd_constants(args: argparse.Namespace) -> int:
    """Print the limiting constants c and gamma"""
    constants = decision_service.limit_constants()
    print(f"c={constants.c:.10f}")
    print(f"gamma={constants.gamma:.10f}")
    return 0
