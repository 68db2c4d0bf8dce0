"""Experiment plans and CSV emission.

An experiment runs a set of policies on one or more benchmark worlds,
replicates each configuration, and streams the results as CSV rows with a
stable schema:

    dataset,policy,objective,replication,seed,n,loss,
    empirical_error_max,empirical_error_any,count_1_1,...,count_C_K

Row kinds (one per checkpoint n each):

* replication rows (``replication`` = 0, 1, ...): that run's loss, its 0/1
  misselection indicator in both error columns (the per-replication max over
  subpopulations of the miss indicator coincides with "any miss"), and its
  realized per-arm counts (1-based column labels).
* ``replication`` = ``mean``: mean loss and mean counts across replications;
  the error columns hold the across-replication aggregates (max over
  subpopulations of the per-subpopulation miss frequency, and the frequency
  of any miss).
* oracle baseline rows (``policy`` = ``oracle``, ``replication`` = ``mean``):
  the closed-form oracle loss and real-valued oracle allocation at each n:
  the optimal worst-case variance for the variance objective, and the exact
  worst-case misselection probability at the surrogate-optimal allocation
  for the pics objective.  Their error columns are ``nan``.

Floats are rendered with 17 significant digits so identical configurations
produce byte-identical files; the infinite-loss sentinel serializes as
``inf``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import builtin_dataset
from .model import DatasetSpec
from .oracle import (
    pics_surrogate_allocation,
    variance_oracle_allocation,
    variance_oracle_loss,
    worst_case_pics_loss,
)
from .policies import POLICY_NAMES, PolicyConfig, default_ordering
from .simulate import OBJECTIVES, RunConfig, default_checkpoints, replicate

BASE_COLUMNS = (
    "dataset",
    "policy",
    "objective",
    "replication",
    "seed",
    "n",
    "loss",
    "empirical_error_max",
    "empirical_error_any",
)

# Ordering variants are addressed as "<policy>:reversed" (gafs-max only).
_REVERSED_SUFFIX = ":reversed"


@dataclass(frozen=True)
class ExperimentPlan:
    """One batch of simulations sharing budget, seed and objective."""

    datasets: tuple[str, ...]
    policies: tuple[str, ...]
    budget: int
    reps: int = 100
    seed: int = 42
    objective: str = "variance"
    epsilon: float = 0.1
    init_pulls: int = 5
    checkpoint_every: int = 5
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "policies", tuple(self.policies))
        if not self.datasets:
            raise ValueError("plan needs at least one dataset")
        if not self.policies:
            raise ValueError("plan needs at least one policy")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        for label in self.policies:
            _split_policy_label(label)
        shapes = {builtin_dataset(name).mu.shape for name in self.datasets}
        if len(shapes) > 1:
            raise ValueError(
                "datasets in one plan must share (subpopulations, treatments) "
                "dimensions so count columns line up; run separate plans"
            )


def _split_policy_label(label: str) -> tuple[str, bool]:
    """Split a policy label into (canonical name, reversed-ordering flag)."""
    reversed_ordering = label.endswith(_REVERSED_SUFFIX)
    name = label[: -len(_REVERSED_SUFFIX)] if reversed_ordering else label
    if name not in POLICY_NAMES:
        raise ValueError(
            f"unknown policy {label!r}; valid policies: {', '.join(POLICY_NAMES)}"
        )
    if reversed_ordering and name != "gafs-max":
        raise ValueError("the :reversed ordering variant applies to gafs-max only")
    return name, reversed_ordering


def csv_header(spec: DatasetSpec) -> list[str]:
    counts = [
        f"count_{i + 1}_{j + 1}"
        for i in range(spec.n_subpops)
        for j in range(spec.n_treatments)
    ]
    return list(BASE_COLUMNS) + counts


def _fmt(value) -> str:
    return f"{float(value):.17g}"


def _count_cells(matrix) -> list[str]:
    return [_fmt(v) for v in np.asarray(matrix, dtype=float).ravel()]


def _oracle_curve(spec: DatasetSpec, objective: str, n: int):
    if objective == "variance":
        return variance_oracle_loss(spec, n), variance_oracle_allocation(spec, n)
    allocation = pics_surrogate_allocation(spec, n)
    return worst_case_pics_loss(spec, allocation), allocation


def run_experiment(plan: ExperimentPlan):
    """Yield CSV rows (lists of strings), header first.

    Rows are ordered by (dataset, policy, replication, n) with the mean
    pseudo-replication after the numbered ones and the oracle baseline rows
    after all policies of a dataset.
    """
    yield csv_header(builtin_dataset(plan.datasets[0]))
    for dataset_name in plan.datasets:
        spec = builtin_dataset(dataset_name)
        init_total = plan.init_pulls * spec.n_arms
        checkpoints = default_checkpoints(init_total, plan.budget, plan.checkpoint_every)
        for label in plan.policies:
            name, reversed_ordering = _split_policy_label(label)
            ordering = None
            if reversed_ordering:
                ordering = default_ordering(spec.n_subpops, spec.n_treatments)[::-1]
            config = RunConfig(
                dataset=spec,
                policy=name,
                budget=plan.budget,
                objective=plan.objective,
                policy_config=PolicyConfig(
                    epsilon=plan.epsilon,
                    init_pulls=plan.init_pulls,
                    ordering=ordering,
                ),
                checkpoints=checkpoints,
                seed=plan.seed,
            )
            result = replicate(config, plan.reps, workers=plan.workers)
            base = [dataset_name, label, plan.objective]
            for r, run in enumerate(result.runs):
                picked_mu = spec.mu[np.arange(spec.n_subpops), run.interim_itrs]
                missed = (picked_mu < spec.mu.max(axis=1)).any(axis=1).astype(float)
                for t, n in enumerate(result.checkpoints):
                    yield (
                        base
                        + [str(r), str(plan.seed), str(int(n))]
                        + [_fmt(run.losses[t]), _fmt(missed[t]), _fmt(missed[t])]
                        + _count_cells(run.interim_counts[t])
                    )
            mean_counts = np.mean([run.interim_counts for run in result.runs], axis=0)
            for t, n in enumerate(result.checkpoints):
                yield (
                    base
                    + ["mean", str(plan.seed), str(int(n))]
                    + [
                        _fmt(result.mean_loss[t]),
                        _fmt(result.empirical_error_max[t]),
                        _fmt(result.empirical_error_any[t]),
                    ]
                    + _count_cells(mean_counts[t])
                )
        for n in checkpoints:
            loss, allocation = _oracle_curve(spec, plan.objective, int(n))
            yield (
                [dataset_name, "oracle", plan.objective, "mean", str(plan.seed), str(int(n))]
                + [_fmt(loss), "nan", "nan"]
                + _count_cells(allocation)
            )


def write_experiment_csv(plan: ExperimentPlan, path: str | None = None) -> Path:
    """Run the plan and write its rows to ``path`` (or ``plan.out``).

    UTF-8, LF line endings.  I/O failures propagate as ``OSError`` carrying
    the offending path.
    """
    target = Path(path if path is not None else plan.out or "experiment.csv")
    with open(target, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in run_experiment(plan):
            writer.writerow(row)
    return target
