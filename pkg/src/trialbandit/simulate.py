"""Single-trial driver and replication harness.

``run_trial`` executes the initialization phase and then the configured
policy until the budget is spent, recording the worst-case loss (true
parameters, realized counts) and the interim treatment recommendation at
every checkpoint.  ``replicate`` runs independent trials whose random
streams are derived deterministically from (seed, replication index), so
results are bit-identical regardless of execution order or parallelism.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ArmId, DatasetSpec, TrialState, new_trial_state
from .oracle import worst_case_pics_loss, worst_case_variance_loss
from .policies import PolicyConfig, init_phase_sequence, make_policy

OBJECTIVES = ("variance", "pics")


def default_checkpoints(init_total: int, budget: int, every: int = 5) -> tuple[int, ...]:
    """Checkpoint grid: every ``every`` pulls from the end of initialization
    to the budget, with the budget itself always included."""
    if every < 1:
        raise ValueError("checkpoint spacing must be >= 1")
    grid = list(range(init_total, budget + 1, every))
    if not grid or grid[-1] != budget:
        grid.append(budget)
    return tuple(grid)


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulated trial depends on."""

    dataset: DatasetSpec
    policy: str
    budget: int
    objective: str = "variance"
    policy_config: PolicyConfig = field(default_factory=PolicyConfig)
    checkpoints: tuple[int, ...] | None = None
    seed: int = 42

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    @property
    def init_total(self) -> int:
        return (
            self.policy_config.init_pulls
            * self.dataset.n_subpops
            * self.dataset.n_treatments
        )

    def resolved_checkpoints(self) -> tuple[int, ...]:
        if self.checkpoints is None:
            return default_checkpoints(self.init_total, self.budget)
        grid = tuple(int(n) for n in self.checkpoints)
        if list(grid) != sorted(set(grid)):
            raise ValueError("checkpoints must be strictly increasing")
        if grid and (grid[0] < self.init_total or grid[-1] > self.budget):
            raise ValueError(
                f"checkpoints must lie in [{self.init_total}, {self.budget}]"
            )
        return grid


@dataclass
class LossTrajectory:
    """Per-checkpoint record of one simulated trial.

    checkpoints[t] pulls have been spent at entry t; losses[t] is the
    worst-case loss of the configured objective evaluated with true
    parameters at the realized counts; interim_itrs[t] / interim_counts[t]
    are the treatment recommendation and count matrix at that point.
    """

    checkpoints: np.ndarray
    losses: np.ndarray
    interim_itrs: np.ndarray
    interim_counts: np.ndarray
    final_itr: np.ndarray
    final_counts: np.ndarray

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(int(n), float(loss)) for n, loss in zip(self.checkpoints, self.losses)]


@dataclass
class ReplicationSet:
    """Aggregate of independent replications sharing one checkpoint grid.

    miss_frequency[t, i] is the fraction of replications whose interim
    recommendation for subpopulation i had a strictly suboptimal true mean;
    empirical_error_max is its max over subpopulations and
    empirical_error_any the fraction of replications with at least one such
    miss.
    """

    checkpoints: np.ndarray
    runs: list[LossTrajectory]
    mean_loss: np.ndarray
    miss_frequency: np.ndarray
    empirical_error_max: np.ndarray
    empirical_error_any: np.ndarray


def sample_response(spec: DatasetSpec, arm, rng: np.random.Generator) -> float:
    """One response draw: normal with the arm's true mean and variance."""
    i, j = arm
    return float(rng.normal(spec.mu[i, j], np.sqrt(spec.sigma2[i, j])))


def run_trial(config: RunConfig, replication: int = 0, policy=None) -> LossTrajectory:
    """Simulate one trial to completion.

    The random stream depends only on (config.seed, replication).  A policy
    object may be injected explicitly (for tests and custom strategies);
    otherwise ``config.policy`` is looked up by name.
    """
    spec = config.dataset
    if config.budget < config.init_total:
        raise ValueError(
            f"budget {config.budget} cannot cover the initialization phase "
            f"({config.init_total} pulls)"
        )
    checkpoints = config.resolved_checkpoints()
    rng = np.random.default_rng([config.seed, replication])
    state = new_trial_state(spec, config.budget)
    if policy is None:
        policy = make_policy(config.policy, spec, config.policy_config)
    evaluate = worst_case_variance_loss if config.objective == "variance" else worst_case_pics_loss

    losses: list[float] = []
    itrs: list[np.ndarray] = []
    count_snaps: list[np.ndarray] = []
    next_ckpt = 0

    def pull(arm: ArmId):
        nonlocal next_ckpt
        state.record_response(arm, sample_response(spec, arm, rng))
        if next_ckpt < len(checkpoints) and state.total_pulls == checkpoints[next_ckpt]:
            losses.append(evaluate(spec, state.counts))
            itrs.append(state.recommend_itr())
            count_snaps.append(state.counts.copy())
            next_ckpt += 1

    for arm in init_phase_sequence(
        spec.n_subpops, spec.n_treatments, config.policy_config.init_pulls
    ):
        pull(arm)
    while state.total_pulls < config.budget:
        decision = policy.decide(state, rng)
        for arm in decision[: config.budget - state.total_pulls]:
            pull(arm)

    return LossTrajectory(
        checkpoints=np.asarray(checkpoints, dtype=np.int64),
        losses=np.asarray(losses),
        interim_itrs=np.asarray(itrs, dtype=np.int64).reshape(len(checkpoints), -1),
        interim_counts=np.asarray(count_snaps, dtype=np.int64).reshape(
            len(checkpoints), spec.n_subpops, spec.n_treatments
        ),
        final_itr=state.recommend_itr(),
        final_counts=state.counts.copy(),
    )


def _run_one(args) -> LossTrajectory:
    config, replication = args
    return run_trial(config, replication)


def replicate(config: RunConfig, reps: int, workers: int = 1) -> ReplicationSet:
    """Run ``reps`` independent trials and aggregate them.

    Each replication r uses the stream derived from (config.seed, r), so
    the result is identical whether replications run serially or across
    ``workers`` processes.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    jobs = [(config, r) for r in range(reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(job) for job in jobs]

    spec = config.dataset
    checkpoints = runs[0].checkpoints
    losses = np.stack([run.losses for run in runs])
    itrs = np.stack([run.interim_itrs for run in runs])
    # A recommendation only counts as a miss when its true mean is strictly
    # below the subpopulation's best; ties in the true means are never wrong.
    best_mu = spec.mu.max(axis=1)
    picked_mu = spec.mu[np.arange(spec.n_subpops)[None, None, :], itrs]
    misses = picked_mu < best_mu[None, None, :]
    return ReplicationSet(
        checkpoints=checkpoints,
        runs=runs,
        mean_loss=losses.mean(axis=0),
        miss_frequency=misses.mean(axis=0),
        empirical_error_max=misses.mean(axis=0).max(axis=1),
        empirical_error_any=misses.any(axis=2).mean(axis=0),
    )
