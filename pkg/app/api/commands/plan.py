import argparse
import json

from app.api.router import CommandRouter, Option
from app.schemas.schemas import EstimationParams
from app.services.sample_service import sample_service

router = CommandRouter()


@router.command(
    "plan",
    options=[
        Option.of("--epsilon", type=float, required=True, help="target loss epsilon"),
        Option.of("--delta", type=float, default=None, help="plan directly for (epsilon, delta, eta)"),
        Option.of("--eta", type=float, default=0.05, help="failure probability for --delta (default 0.05)"),
        Option.of("--n", type=int, default=None, help="horizon, to report skipped tail positions"),
    ],
)
def cmd_plan(args: argparse.Namespace) -> int:
    """
    Sample-size planner

    With --delta the estimation bound is evaluated for the given parameters;
    without it the parameters are derived from epsilon as in the sample-based pipeline.
    """
    if args.delta is not None:
        params = EstimationParams(epsilon=args.epsilon, delta=args.delta, eta=args.eta)
        source = "direct"
    else:
        params = sample_service.derived_params(args.epsilon)
        source = "pipeline"
    plan = {
        "source": source,
        "epsilon": args.epsilon,
        "inner_epsilon": params.epsilon,
        "delta": params.delta,
        "eta": params.eta,
        "required_samples": sample_service.required_sample_size(params),
    }
    if args.n is not None and source == "pipeline":
        plan["skipped_tail"] = sample_service.skip_count(args.n, args.epsilon)
    print(json.dumps(plan, indent=2, sort_keys=True))
    return 0
