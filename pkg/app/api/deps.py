"""
Shared command options and their resolution
"""
import argparse
from typing import Optional

from app.api.router import Option
from app.core.config import settings
from app.core.exceptions import UsageError
from app.schemas.schemas import MAX_SEED


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must lie in 0..2^64-1, got {text}")
    return value


seed_option = Option.of("--seed", type=_u64, default=None, help=f"master seed (default {settings.DEFAULT_SEED})")
trials_option = Option.of("--trials", type=int, default=None, help=f"Monte Carlo trials (default {settings.DEFAULT_TRIALS})")
workers_option = Option.of("--workers", type=int, default=None, help="worker processes; results do not depend on it")
out_option = Option.of("--out", default=None, help="output path ('-' or omitted: stdout)")
config_option = Option.of("--config", required=True, help="experiment config (JSON)")
n_option = Option.of("--n", type=int, required=True, help="horizon / number of bins")


def get_workers(args: argparse.Namespace) -> int:
    workers = getattr(args, "workers", None)
    workers = settings.WORKERS if workers is None else workers
    if workers < 1:
        raise UsageError(f"--workers must be at least 1, got {workers}")
    return workers


def get_seed(args: argparse.Namespace, fallback: Optional[int] = None) -> int:
    seed = getattr(args, "seed", None)
    if seed is not None:
        return seed
    return settings.DEFAULT_SEED if fallback is None else fallback


def get_trials(args: argparse.Namespace, fallback: Optional[int] = None) -> int:
    trials = getattr(args, "trials", None)
    if trials is None:
        trials = settings.DEFAULT_TRIALS if fallback is None else fallback
    if trials < 1:
        raise UsageError(f"--trials must be at least 1, got {trials}")
    return trials
