import argparse
import sys

from app.api.deps import config_option, get_seed, get_workers, out_option, seed_option, trials_option, workers_option
from app.api.router import CommandRouter
from app.crud.artifacts import config_crud, manifest_crud, result_crud
from app.services.simulation_service import simulation_service

router = CommandRouter()


@router.command(
    "simulate",
    options=[config_option, out_option, seed_option, trials_option, workers_option],
)
def cmd_simulate(args: argparse.Namespace) -> int:
    """Run the experiment described by a JSON config and write the result"""
    config = config_crud.read(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = get_seed(args)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = config_crud.schema.model_validate({**config.model_dump(), **overrides})

    result = simulation_service.run_experiment(config, workers=get_workers(args))
    if args.out is None or args.out == "-":
        sys.stdout.write(result_crud.dumps(result))
        return 0
    result_crud.write(args.out, result)
    manifest_crud.write_for(args.out, "simulate", config.model_dump(mode="json"), config.seed)
    return 0
