import argparse

from app.api.deps import get_seed, get_trials, get_workers, out_option, seed_option, trials_option, workers_option
from app.api.router import CommandRouter, Option
from app.core.exceptions import UsageError
from app.crud.artifacts import csv_table_crud, manifest_crud
from app.models.distributions import Uniform
from app.schemas.schemas import ExperimentConfig
from app.services.decision_service import decision_service
from app.services.simulation_service import simulation_service

router = CommandRouter()


@router.command(
    "sweep",
    options=[
        Option.of("--n-min", type=int, default=1, help="smallest horizon (default 1)"),
        Option.of("--n", "--n-max", dest="n_max", type=int, required=True, help="largest horizon"),
        trials_option,
        seed_option,
        out_option,
        workers_option,
    ],
)
def cmd_sweep(args: argparse.Namespace) -> int:
    """Success rate versus horizon for IID Uniform(0, 1) as CSV "n,rate,stderr,formula,gamma" """
    if not 1 <= args.n_min <= args.n_max:
        raise UsageError(f"Need 1 <= n-min <= n-max, got {args.n_min}..{args.n_max}")
    trials, seed, workers = get_trials(args), get_seed(args), get_workers(args)
    gamma = decision_service.limit_constants().gamma

    rows = []
    for n in range(args.n_min, args.n_max + 1):
        config = ExperimentConfig(distributions=[Uniform()] * n, trials=trials, seed=seed)
        result = simulation_service.run_experiment(config, workers=workers)
        rows.append([n, result.rate, result.stderr, result.reference_bound, gamma])

    csv_table_crud.write(args.out, ["n", "rate", "stderr", "formula", "gamma"], rows)
    if args.out not in (None, "-"):
        manifest_crud.write_for(
            args.out, "sweep", {"n_min": args.n_min, "n_max": args.n_max, "trials": trials}, seed
        )
    return 0
