import argparse
import sys

from app.api.deps import get_seed, get_trials, get_workers, n_option, out_option, seed_option, trials_option, workers_option
from app.api.router import CommandRouter, Option
from app.crud.artifacts import manifest_crud, result_crud
from app.models.models import BallsBinsModel
from app.services.negdep_service import negdep_service

router = CommandRouter()


@router.command(
    "balls-bins",
    options=[
        Option.of("--balls", type=int, required=True, help="number of balls m"),
        n_option,
        Option.of("--method", choices=["exact", "interpolated"], default="exact",
                  help="augmented count threshold: exact (default) or interpolated, a comparison-only "
                  "approximation that misses the m=0 anchor (u = d^n instead of d)"),
        trials_option,
        seed_option,
        out_option,
        workers_option,
    ],
)
def cmd_balls_bins(args: argparse.Namespace) -> int:
    """Secretary over balls-and-bins counts presented in random order"""
    model = BallsBinsModel(balls=args.balls, bins=args.n)
    trials, seed = get_trials(args), get_seed(args)
    result = negdep_service.simulate_balls_bins_secretary(
        model, trials, seed, workers=get_workers(args), method=args.method
    )
    if args.out is None or args.out == "-":
        sys.stdout.write(result_crud.dumps(result))
        return 0
    result_crud.write(args.out, result)
    manifest_crud.write_for(
        args.out,
        "balls-bins",
        {"balls": args.balls, "bins": args.n, "trials": trials, "method": args.method},
        seed,
    )
    return 0
