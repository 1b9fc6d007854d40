import argparse

from app.api.deps import n_option, out_option
from app.api.router import CommandRouter
from app.crud.artifacts import csv_table_crud, manifest_crud
from app.models.distributions import Uniform
from app.services.decision_service import decision_service
from app.services.strategy_service import strategy_service

router = CommandRouter()


@router.command("decision-numbers", options=[n_option, out_option])
def cmd_decision_numbers(args: argparse.Namespace) -> int:
    """
    Optimal decision numbers for horizon n as CSV "i,d,tau"

    tau is the threshold for IID Uniform(0, 1) draws, where tau_i = d_i.
    """
    d = decision_service.optimal_decision_numbers(args.n)
    thresholds = strategy_service.thresholds_from_decision_numbers([Uniform()] * args.n, d)
    rows = [[i, d_i, tau.primary] for i, (d_i, tau) in enumerate(zip(d.values, thresholds), start=1)]
    csv_table_crud.write(args.out, ["i", "d", "tau"], rows)
    if args.out not in (None, "-"):
        manifest_crud.write_for(args.out, "decision-numbers", {"n": args.n})
    return 0
