"""Command-line interface.

Subcommands:

* ``list-datasets``: print the registry with dimensions.
* ``oracle``: print the closed-form oracle allocation and its worst-case
  loss for a dataset, budget and objective.
* ``simulate``: replicate a policy on a dataset and write the experiment
  CSV (see ``trialbandit.experiments`` for the schema).

Exit status: 0 on success, 2 on usage errors (unknown flags, datasets or
policies), 1 on runtime failures such as unwritable output paths.
"""

from __future__ import annotations

import argparse
import sys

from .datasets import builtin_dataset, dataset_names
from .experiments import ExperimentPlan, write_experiment_csv
from .oracle import (
    pics_surrogate_allocation,
    variance_oracle_allocation,
    variance_oracle_loss,
    worst_case_pics_loss,
)
from .simulate import OBJECTIVES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trialbandit",
        description="Budgeted minimax bandit allocation for stratified trials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-datasets", help="print the builtin dataset registry")

    oracle = sub.add_parser("oracle", help="print the oracle allocation and loss")
    oracle.add_argument("--dataset", required=True)
    oracle.add_argument("--budget", required=True, type=int)
    oracle.add_argument("--objective", choices=OBJECTIVES, default="variance")

    simulate = sub.add_parser("simulate", help="replicate a policy and write CSV")
    simulate.add_argument("--dataset", required=True)
    simulate.add_argument("--policy", required=True)
    simulate.add_argument("--budget", required=True, type=int)
    simulate.add_argument("--reps", type=int, default=100)
    simulate.add_argument("--seed", type=int, default=42)
    simulate.add_argument("--epsilon", type=float, default=0.1)
    simulate.add_argument("--init-pulls", type=int, default=5)
    simulate.add_argument("--objective", choices=OBJECTIVES, default="variance")
    simulate.add_argument("--checkpoint-every", type=int, default=5)
    simulate.add_argument("--out", required=True)

    return parser


def _print_oracle(args) -> int:
    spec = builtin_dataset(args.dataset)
    if args.budget < 1:
        print("error: --budget must be positive", file=sys.stderr)
        return 2
    if args.objective == "variance":
        allocation = variance_oracle_allocation(spec, args.budget)
        loss = variance_oracle_loss(spec, args.budget)
    else:
        allocation = pics_surrogate_allocation(spec, args.budget)
        loss = worst_case_pics_loss(spec, allocation)
    print(
        f"{spec.name}: {spec.n_subpops} subpopulations x {spec.n_treatments} "
        f"treatments, budget {args.budget}, objective {args.objective}"
    )
    print("oracle allocation (rows = subpopulations):")
    for row in allocation:
        print("  " + "  ".join(f"{v:12.6f}" for v in row))
    print(f"worst-case loss: {loss:.12g}")
    return 0


def _run_simulate(args) -> int:
    plan = ExperimentPlan(
        datasets=(args.dataset,),
        policies=(args.policy,),
        budget=args.budget,
        reps=args.reps,
        seed=args.seed,
        objective=args.objective,
        epsilon=args.epsilon,
        init_pulls=args.init_pulls,
        checkpoint_every=args.checkpoint_every,
        out=args.out,
    )
    path = write_experiment_csv(plan)
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return int(exc.code or 0)
    try:
        if args.command == "list-datasets":
            for name in dataset_names():
                spec = builtin_dataset(name)
                print(
                    f"{name:10s} {spec.n_subpops} subpopulations x "
                    f"{spec.n_treatments} treatments"
                )
            return 0
        if args.command == "oracle":
            return _print_oracle(args)
        return _run_simulate(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        path = getattr(exc, "filename", None) or getattr(args, "out", "")
        print(f"error: cannot write {path}: {exc.strerror or exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
