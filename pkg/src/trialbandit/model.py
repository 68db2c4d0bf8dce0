"""Core domain types for stratified-trial bandit simulations.

A trial world is a grid of (subpopulation, treatment) arms.  ``DatasetSpec``
holds the ground truth (subpopulation mix, per-arm response means and
variances); ``TrialState`` accumulates pull counts and running response
statistics for every arm, which is all the information an online allocation
policy is allowed to observe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class BudgetExhaustedError(RuntimeError):
    """Raised when a response is recorded after the pull budget is spent."""


class ArmId(NamedTuple):
    """One (subpopulation, treatment) pair, 0-based."""

    subpop: int
    treatment: int


@dataclass(frozen=True)
class DatasetSpec:
    """Ground-truth description of a trial world.

    Parameters
    ----------
    name : str
        Identifier used in CSV output and error messages.
    p : array, shape (C,)
        Prevalence of each subpopulation in the general population.
        Nonnegative, sums to 1 within 1e-9.
    mu : array, shape (C, K)
        True mean response of treatment j within subpopulation i.
    sigma2 : array, shape (C, K)
        True response variances; all strictly positive.
    """

    name: str
    p: np.ndarray
    mu: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        mu = np.atleast_2d(np.array(self.mu, dtype=float))
        sigma2 = np.atleast_2d(np.array(self.sigma2, dtype=float))
        if mu.ndim != 2 or sigma2.shape != mu.shape:
            raise ValueError("mu and sigma2 must be matrices of identical shape")
        n_subpops, n_treatments = mu.shape
        if n_subpops < 1 or n_treatments < 2:
            raise ValueError("need at least one subpopulation and two treatments")
        if p.shape != (n_subpops,):
            raise ValueError(f"p must be a vector of length {n_subpops}")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("subpopulation probabilities must be nonnegative and sum to 1")
        if (sigma2 <= 0).any():
            raise ValueError("all response variances must be strictly positive")
        for arr in (p, mu, sigma2):
            arr.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", sigma2)

    @property
    def n_subpops(self) -> int:
        return self.mu.shape[0]

    @property
    def n_treatments(self) -> int:
        return self.mu.shape[1]

    @property
    def n_arms(self) -> int:
        return self.mu.size

    def true_best(self) -> np.ndarray:
        """Truly best treatment per subpopulation (lowest index on ties)."""
        return self.mu.argmax(axis=1)


@dataclass(frozen=True)
class ArmStats:
    """Running statistics of one arm: pull count, mean, sum of squared deviations."""

    count: int
    mean: float
    m2: float

    @property
    def variance(self) -> float:
        """Unbiased sample variance; 0.0 for fewer than two observations."""
        if self.count < 2:
            return 0.0
        return self.m2 / (self.count - 1)

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


class TrialState:
    """Observable state of one running trial.

    Per-arm counts and running first/second moments are stored as (C, K)
    arrays and updated with a numerically stable one-pass (Welford) scheme.
    The state is a plain value owned by a single simulation run; it is not
    safe for shared mutation, and does not need to be.
    """

    def __init__(self, n_subpops: int, n_treatments: int, budget: int):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        if n_subpops < 1 or n_treatments < 1:
            raise ValueError("state needs at least one subpopulation and treatment")
        self.counts = np.zeros((n_subpops, n_treatments), dtype=np.int64)
        self.means = np.zeros((n_subpops, n_treatments))
        self.m2 = np.zeros((n_subpops, n_treatments))
        self.budget = int(budget)
        self.total_pulls = 0

    @property
    def n_subpops(self) -> int:
        return self.counts.shape[0]

    @property
    def n_treatments(self) -> int:
        return self.counts.shape[1]

    @property
    def remaining_budget(self) -> int:
        return self.budget - self.total_pulls

    def record_response(self, arm, response: float) -> None:
        """Record one observed response for ``arm``.

        Increments the arm's count and updates its running mean and m2;
        no other arm is touched.  Raises ``BudgetExhaustedError`` once
        ``total_pulls`` has reached the budget.
        """
        if self.total_pulls >= self.budget:
            raise BudgetExhaustedError(
                f"budget of {self.budget} pulls already spent"
            )
        i, j = arm
        self.counts[i, j] += 1
        delta = response - self.means[i, j]
        self.means[i, j] += delta / self.counts[i, j]
        self.m2[i, j] += delta * (response - self.means[i, j])
        self.total_pulls += 1

    def arm_stats(self, arm) -> ArmStats:
        i, j = arm
        return ArmStats(int(self.counts[i, j]), float(self.means[i, j]), float(self.m2[i, j]))

    def arm_summary(self, arm) -> tuple[int, float, float]:
        """(count, mean estimate, sample-std estimate) for one arm.

        The sample standard deviation uses the n-1 denominator and is
        reported as 0.0 for arms with fewer than two observations, so the
        summary is total even before initialization completes.
        """
        stats = self.arm_stats(arm)
        return stats.count, stats.mean, stats.std

    def std_estimates(self) -> np.ndarray:
        """Matrix of per-arm sample standard deviations (0.0 below 2 pulls)."""
        denom = np.maximum(self.counts - 1, 1)
        var = np.where(self.counts >= 2, self.m2 / denom, 0.0)
        return np.sqrt(var)

    def recommend_itr(self) -> np.ndarray:
        """Treatment recommendation per subpopulation: argmax of the
        estimated means, ties broken by the lowest treatment index.

        Arms that were never pulled contribute their empty-arm mean of 0.
        """
        return self.means.argmax(axis=1)


def new_trial_state(spec: DatasetSpec, budget: int) -> TrialState:
    """Fresh all-zero trial state sized for ``spec`` with the given pull budget."""
    return TrialState(spec.n_subpops, spec.n_treatments, budget)
