"""Online allocation policies.

All five policies share one initialization phase (every arm pulled
``init_pulls`` times, round-robin) before any adaptive decision is made.
After that:

* ``areoa`` samples arms from the plug-in estimate of the variance-objective
  oracle fractions, mixed with uniform exploration at rate epsilon.
* ``aarandom`` recruits subpopulations at their population prevalence and
  assigns treatments uniformly at random.
* ``gafs-max`` forces revisits of under-pulled arms (count below
  sqrt(total pulls) + 1) in a fixed arm ordering; otherwise it pulls the arm
  with the largest estimated variance per pull.
* ``minmaxpics-seq`` samples arms from the plug-in misselection-weight
  fractions, epsilon-mixed like areoa.
* ``minmaxpics-grp`` samples a subpopulation from the plug-in row weights
  (epsilon-mixed at the subpopulation level) and assigns one patient to each
  treatment of that subpopulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ArmId, DatasetSpec, TrialState
from .oracle import pics_weight_matrix

POLICY_NAMES = ("areoa", "aarandom", "gafs-max", "minmaxpics-seq", "minmaxpics-grp")


@dataclass(frozen=True)
class PolicyConfig:
    """Shared policy knobs.

    epsilon is the uniform-exploration rate used by areoa and both
    minmaxpics variants; init_pulls is the number of mandatory pulls per arm
    before adaptive decisions start; ordering (gafs-max only) is a
    permutation of the flattened arm indices i * K + j.
    """

    epsilon: float = 0.1
    init_pulls: int = 5
    ordering: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.init_pulls < 1:
            raise ValueError("init_pulls must be at least 1")


def default_ordering(n_subpops: int, n_treatments: int) -> tuple[int, ...]:
    """Identity arm ordering: subpopulation-major, treatment-minor."""
    return tuple(range(n_subpops * n_treatments))


def _ordering_ranks(ordering, n_arms: int) -> np.ndarray:
    ordering = np.asarray(ordering, dtype=int)
    if sorted(ordering.tolist()) != list(range(n_arms)):
        raise ValueError(f"ordering must be a permutation of 0..{n_arms - 1}")
    ranks = np.empty(n_arms, dtype=int)
    ranks[ordering] = np.arange(n_arms)
    return ranks


def init_phase_sequence(n_subpops: int, n_treatments: int, init_pulls: int) -> list[ArmId]:
    """Arm schedule of the initialization phase: ``init_pulls`` round-robin
    passes over all arms, subpopulation-major."""
    if min(n_subpops, n_treatments, init_pulls) < 1:
        raise ValueError("n_subpops, n_treatments and init_pulls must be >= 1")
    return [
        ArmId(i, j)
        for _ in range(init_pulls)
        for i in range(n_subpops)
        for j in range(n_treatments)
    ]


def uniform_weights(n_subpops: int, n_treatments: int) -> np.ndarray:
    return np.full((n_subpops, n_treatments), 1.0 / (n_subpops * n_treatments))


def _normalized_minimax_weights(value_matrix: np.ndarray) -> np.ndarray:
    """Normalize value[i,j] * rowsum(value)[i] into a probability matrix.

    Falls back to uniform when every value is zero; when gap-floored entries
    saturate past float range, weight is split uniformly across them.
    """
    weights = value_matrix * value_matrix.sum(axis=1, keepdims=True)
    if not np.isfinite(weights).all():
        weights = np.where(np.isfinite(weights), 0.0, 1.0)
    total = weights.sum()
    if total <= 0.0:
        return uniform_weights(*value_matrix.shape)
    return weights / total


def areoa_weights(state: TrialState) -> np.ndarray:
    """Plug-in sampling fractions of the variance objective: proportional to
    std_hat[i, j] * rowsum(std_hat)[i], uniform when every estimate is zero."""
    return _normalized_minimax_weights(state.std_estimates())


def minmaxpics_seq_weights(state: TrialState) -> np.ndarray:
    """Plug-in sampling fractions of the misselection objective, computed
    from the estimated means and standard deviations."""
    return _normalized_minimax_weights(
        pics_weight_matrix(state.means, state.std_estimates())
    )


def minmaxpics_subpop_weights(state: TrialState) -> np.ndarray:
    """Subpopulation marginals of the misselection fractions: proportional
    to rowsum(weights)[i]**2."""
    row_sums = pics_weight_matrix(state.means, state.std_estimates()).sum(axis=1)
    squared = row_sums**2
    if not np.isfinite(squared).all():
        squared = np.where(np.isfinite(squared), 0.0, 1.0)
    total = squared.sum()
    if total <= 0.0:
        return np.full(state.n_subpops, 1.0 / state.n_subpops)
    return squared / total


def epsilon_greedy_sample(weights: np.ndarray, epsilon: float, rng: np.random.Generator) -> ArmId:
    """Sample one arm from (1 - epsilon) * weights + epsilon * uniform."""
    n_subpops, n_treatments = weights.shape
    n_arms = weights.size
    mixture = (1.0 - epsilon) * weights.ravel() + epsilon / n_arms
    flat = rng.choice(n_arms, p=mixture / mixture.sum())
    return ArmId(int(flat) // n_treatments, int(flat) % n_treatments)


def aarandom_select(spec: DatasetSpec, rng: np.random.Generator) -> ArmId:
    """Subpopulation drawn at its population prevalence, treatment uniform."""
    i = int(rng.choice(spec.n_subpops, p=spec.p))
    j = int(rng.integers(spec.n_treatments))
    return ArmId(i, j)


def gafs_max_select(state: TrialState, ordering) -> ArmId:
    """Deterministic forced-exploration policy.

    Arms with count below sqrt(total pulls) + 1 form the forced set; if it
    is nonempty, the member earliest in ``ordering`` is pulled.  Otherwise
    the arm maximizing estimated variance per pull, ties again broken by
    the ordering.
    """
    n_treatments = state.n_treatments
    counts = state.counts.ravel()
    ranks = _ordering_ranks(ordering, counts.size)
    forced = counts < np.sqrt(state.total_pulls) + 1.0
    if forced.any():
        candidates = np.nonzero(forced)[0]
    else:
        score = (state.std_estimates() ** 2).ravel() / counts
        candidates = np.nonzero(score == score.max())[0]
    flat = int(candidates[np.argmin(ranks[candidates])])
    return ArmId(flat // n_treatments, flat % n_treatments)


def minmaxpics_grp_select(
    state: TrialState, rng: np.random.Generator, epsilon: float = 0.0
) -> list[ArmId]:
    """Group decision: pick one subpopulation (epsilon-mixed plug-in row
    weights) and assign one patient per treatment.

    When fewer than K pulls remain, only the first ``remaining`` treatments
    in index order are assigned.
    """
    marginals = minmaxpics_subpop_weights(state)
    mixture = (1.0 - epsilon) * marginals + epsilon / state.n_subpops
    i = int(rng.choice(state.n_subpops, p=mixture / mixture.sum()))
    take = min(state.n_treatments, state.remaining_budget)
    return [ArmId(i, j) for j in range(take)]


# --- policy objects used by the trial driver -------------------------------


@dataclass(frozen=True)
class AreoaPolicy:
    epsilon: float = 0.1

    def decide(self, state: TrialState, rng: np.random.Generator) -> list[ArmId]:
        return [epsilon_greedy_sample(areoa_weights(state), self.epsilon, rng)]


@dataclass(frozen=True)
class AARandomPolicy:
    spec: DatasetSpec

    def decide(self, state: TrialState, rng: np.random.Generator) -> list[ArmId]:
        return [aarandom_select(self.spec, rng)]


@dataclass(frozen=True)
class GafsMaxPolicy:
    ordering: tuple[int, ...]

    def decide(self, state: TrialState, rng: np.random.Generator) -> list[ArmId]:
        return [gafs_max_select(state, self.ordering)]


@dataclass(frozen=True)
class MinmaxPicsSeqPolicy:
    epsilon: float = 0.1

    def decide(self, state: TrialState, rng: np.random.Generator) -> list[ArmId]:
        return [epsilon_greedy_sample(minmaxpics_seq_weights(state), self.epsilon, rng)]


@dataclass(frozen=True)
class MinmaxPicsGrpPolicy:
    epsilon: float = 0.1

    def decide(self, state: TrialState, rng: np.random.Generator) -> list[ArmId]:
        return minmaxpics_grp_select(state, rng, self.epsilon)


def make_policy(name: str, spec: DatasetSpec, config: PolicyConfig):
    """Instantiate a policy by its stable identifier."""
    if name == "areoa":
        return AreoaPolicy(config.epsilon)
    if name == "aarandom":
        return AARandomPolicy(spec)
    if name == "gafs-max":
        ordering = config.ordering
        if ordering is None:
            ordering = default_ordering(spec.n_subpops, spec.n_treatments)
        _ordering_ranks(ordering, spec.n_arms)
        return GafsMaxPolicy(tuple(ordering))
    if name == "minmaxpics-seq":
        return MinmaxPicsSeqPolicy(config.epsilon)
    if name == "minmaxpics-grp":
        return MinmaxPicsGrpPolicy(config.epsilon)
    raise ValueError(f"unknown policy {name!r}; valid policies: {', '.join(POLICY_NAMES)}")
