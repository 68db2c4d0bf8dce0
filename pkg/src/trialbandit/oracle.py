"""Closed-form oracle allocations and worst-case loss evaluators.

Both objectives supported by this package share one algebraic skeleton.
Given a nonnegative per-arm weight matrix w, the budget split

    n[i, j] = w[i, j] * rowsum(w)[i] / sum_i rowsum(w)[i]**2 * N

minimizes the worst case over subpopulations of sum_j w[i, j]**2 / n[i, j]
subject to sum(n) = N (integer constraints deliberately ignored), and
equalizes that quantity across subpopulations.  With w equal to the true
response standard deviations the objective is the variance of the estimated
treatment effect; with w equal to the gap-scaled misselection weights it is
the Boole/Chebyshev surrogate of the probability of incorrectly selecting a
suboptimal treatment (PICS).

The exact PICS of a subpopulation is a one-dimensional normal expectation
evaluated here by Gauss-Hermite quadrature with an adaptive fallback.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate
from scipy.special import ndtr

from .model import DatasetSpec

# Floor applied to |mean gaps| before division in the misselection weights;
# tied estimated means then saturate instead of dividing by zero.
GAP_FLOOR = 1e-12

_QUAD_NODES = 128
# Integration beyond |z| = 9 contributes < 3e-19 to a unit-bounded integrand.
_QUAD_CUTOFF = 9.0
# When the 64- and 128-node rules disagree by more than this, the integrand
# is too step-like for fixed nodes and the evaluation escalates to adaptive
# quadrature.  The node-halving estimate can alias to zero for extreme
# slopes (both rules then see the same step), so slopes beyond
# _GH_SLOPE_LIMIT escalate unconditionally; 128 nodes are accurate to
# ~1e-13 up to slope 3.
_ESCALATION_TOL = 1e-12
_GH_SLOPE_LIMIT = 2.5


def normal_cdf(x):
    """Standard normal CDF, vectorized, accurate to well below 1e-12."""
    return ndtr(x)


@lru_cache(maxsize=None)
def _gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Probabilists' flavor: nodes/weights for integration against phi(z) dz.
    nodes, weights = np.polynomial.hermite_e.hermegauss(n)
    return nodes, weights / np.sqrt(2.0 * np.pi)


class PicsWeightRow(NamedTuple):
    """Misselection weights of one subpopulation row.

    ``weights[j]`` scales how hard treatment j is to separate from the best
    one; ``best`` is the index of the row's best treatment (argmax of the
    means, lowest index on ties).
    """

    weights: np.ndarray
    best: int


def _as_positive_row(values, name: str) -> np.ndarray:
    row = np.asarray(values, dtype=float)
    if row.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if (row <= 0).any():
        raise ValueError(f"{name} entries must be strictly positive")
    return row


def pics_weight_row(mu_row, sigma_row, gap_floor: float = GAP_FLOOR) -> PicsWeightRow:
    """Misselection weights for one subpopulation.

    For every inferior treatment j the weight is std[j] / |gap_j| where
    gap_j is the mean difference to the best treatment; the best treatment's
    weight is std[best] * sqrt(sum_j 1 / gap_j**2).  Gaps are floored at
    ``gap_floor`` so that tied means saturate rather than divide by zero.

    Zero stds are allowed (they yield zero weights) because the plug-in
    policies evaluate this on sample estimates, which are zero until an arm
    has two distinct responses.
    """
    mu_row = np.asarray(mu_row, dtype=float)
    sigma_row = np.asarray(sigma_row, dtype=float)
    if (sigma_row < 0).any():
        raise ValueError("sigma_row entries must be nonnegative")
    best = int(mu_row.argmax())
    gaps = np.maximum(np.abs(mu_row[best] - mu_row), gap_floor)
    weights = sigma_row / gaps
    inferior = np.arange(mu_row.size) != best
    weights[best] = sigma_row[best] * np.sqrt((1.0 / gaps[inferior] ** 2).sum())
    return PicsWeightRow(weights, best)


def pics_weight_matrix(mu, sigma, gap_floor: float = GAP_FLOOR) -> np.ndarray:
    """Stack of ``pics_weight_row`` weights, one row per subpopulation."""
    mu = np.atleast_2d(np.asarray(mu, dtype=float))
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    return np.vstack([
        pics_weight_row(mu[i], sigma[i], gap_floor).weights for i in range(mu.shape[0])
    ])


def _allocation_from_weights(weights: np.ndarray, budget: float) -> np.ndarray:
    row_sums = weights.sum(axis=1)
    denom = (row_sums**2).sum()
    return weights * row_sums[:, None] / denom * budget


def variance_oracle_allocation(spec: DatasetSpec, budget: float) -> np.ndarray:
    """Budget split minimizing the worst-case treatment-effect variance.

    Real-valued (non-integer) allocation; entries are strictly positive and
    sum to ``budget``.  The per-subpopulation variances sum_j sigma2/n are
    equal across subpopulations at this allocation.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    return _allocation_from_weights(np.sqrt(spec.sigma2), float(budget))


def variance_oracle_loss(spec: DatasetSpec, budget: float) -> float:
    """Worst-case treatment-effect variance at the oracle allocation:
    sum_i (sum_j sigma_ij)**2 / budget."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    row_sums = np.sqrt(spec.sigma2).sum(axis=1)
    return float((row_sums**2).sum() / budget)


def pics_surrogate_allocation(spec: DatasetSpec, budget: float) -> np.ndarray:
    """Budget split minimizing the Boole/Chebyshev misselection surrogate,
    computed from the true means and standard deviations."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    weights = pics_weight_matrix(spec.mu, np.sqrt(spec.sigma2))
    return _allocation_from_weights(weights, float(budget))


def pics_surrogate_row_loss(mu_row, sigma_row, n_row) -> float:
    """Boole + Chebyshev upper bound on one subpopulation's misselection
    probability: sum over inferior j of (var_j/n_j + var_best/n_best) / gap_j**2."""
    mu_row = np.asarray(mu_row, dtype=float)
    sigma_row = _as_positive_row(sigma_row, "sigma_row")
    n_row = _as_positive_row(n_row, "n_row")
    best = int(mu_row.argmax())
    var_over_n = sigma_row**2 / n_row
    inferior = np.arange(mu_row.size) != best
    gaps = mu_row[best] - mu_row[inferior]
    return float(((var_over_n[inferior] + var_over_n[best]) / gaps**2).sum())


def _row_quadrature_params(mu_row, sigma_row, n_row):
    """Slope/offset pairs of the misselection integrand for one row.

    Conditioning on the best arm's estimated mean (a standard normal z),
    every inferior arm j contributes one factor Phi(a_j z + b_j).
    """
    best = int(mu_row.argmax())
    scale = sigma_row / np.sqrt(n_row)
    inferior = np.arange(mu_row.size) != best
    slope = scale[best] / scale[inferior]
    offset = (mu_row[best] - mu_row[inferior]) / scale[inferior]
    return slope, offset


def _correct_selection_gh(slope, offset, nodes_count) -> float:
    nodes, weights = _gauss_hermite(nodes_count)
    factors = ndtr(slope[:, None] * nodes[None, :] + offset[:, None])
    return float(weights @ factors.prod(axis=0))


def _correct_selection_adaptive(slope, offset) -> float:
    def integrand(z):
        return np.prod(ndtr(slope * z + offset)) * np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)

    # Bracket every factor's transition layer (center -offset/slope, width
    # ~1/slope) so each layer lies strictly inside one subinterval; splitting
    # exactly at a transition can hide the layer from the error estimator.
    transitions = -offset / slope
    half_widths = 10.0 / np.maximum(slope, 1.0)
    brackets = np.concatenate([transitions - half_widths, transitions + half_widths])
    points = sorted(set(np.clip(brackets, -_QUAD_CUTOFF + 0.5, _QUAD_CUTOFF - 0.5)))
    value, _ = integrate.quad(
        integrand,
        -_QUAD_CUTOFF,
        _QUAD_CUTOFF,
        points=points,
        epsabs=1e-14,
        epsrel=1e-12,
        limit=300,
    )
    return value


def _correct_selection_probability(slope, offset) -> float:
    if slope.max(initial=0.0) > _GH_SLOPE_LIMIT:
        return _correct_selection_adaptive(slope, offset)
    coarse = _correct_selection_gh(slope, offset, _QUAD_NODES // 2)
    fine = _correct_selection_gh(slope, offset, _QUAD_NODES)
    if abs(fine - coarse) > _ESCALATION_TOL:
        return _correct_selection_adaptive(slope, offset)
    return fine


def exact_pics_loss(mu_row, sigma_row, n_row) -> float:
    """Probability that some inferior treatment's estimated mean reaches or
    exceeds the best treatment's, for one subpopulation.

    Estimated means are treated as exactly normal with variance
    sigma**2 / n; ``n_row`` may be real-valued so that oracle allocations
    can be evaluated directly.  The defining integral is computed by
    128-node Gauss-Hermite quadrature, escalating to adaptive quadrature
    whenever a node-halving check suggests the fixed rule cannot reach
    absolute accuracy ~1e-12.  The result is clamped to [0, 1].
    """
    mu_row = np.asarray(mu_row, dtype=float)
    sigma_row = _as_positive_row(sigma_row, "sigma_row")
    n_row = _as_positive_row(n_row, "n_row")
    slope, offset = _row_quadrature_params(mu_row, sigma_row, n_row)
    return float(np.clip(1.0 - _correct_selection_probability(slope, offset), 0.0, 1.0))


def _pics_loss_rows(mu, sigma2, counts) -> np.ndarray:
    """Exact misselection probability per subpopulation, vectorized across
    rows on the Gauss-Hermite fast path."""
    n_subpops, n_treatments = mu.shape
    scale = np.sqrt(sigma2 / counts)
    best = mu.argmax(axis=1)
    rows = np.arange(n_subpops)
    inferior_mask = np.ones((n_subpops, n_treatments), dtype=bool)
    inferior_mask[rows, best] = False
    slope = (scale[rows, best][:, None] / scale[inferior_mask].reshape(n_subpops, -1))
    offset = (
        (mu[rows, best][:, None] - mu[inferior_mask].reshape(n_subpops, -1))
        / scale[inferior_mask].reshape(n_subpops, -1)
    )

    def stacked(nodes_count):
        nodes, weights = _gauss_hermite(nodes_count)
        factors = ndtr(slope[:, :, None] * nodes[None, None, :] + offset[:, :, None])
        return factors.prod(axis=1) @ weights

    coarse = stacked(_QUAD_NODES // 2)
    fine = stacked(_QUAD_NODES)
    losses = 1.0 - fine
    hard = (np.abs(fine - coarse) > _ESCALATION_TOL) | (
        slope.max(axis=1) > _GH_SLOPE_LIMIT
    )
    for i in np.nonzero(hard)[0]:
        losses[i] = 1.0 - _correct_selection_adaptive(slope[i], offset[i])
    return np.clip(losses, 0.0, 1.0)


def worst_case_variance_loss(spec: DatasetSpec, counts) -> float:
    """Worst case over subpopulations of sum_j sigma2[i, j] / counts[i, j],
    using the true variances.

    Zero counts yield +inf (a documented sentinel, not an error) so that
    loss trajectories are defined at every checkpoint.
    """
    counts = np.asarray(counts, dtype=float)
    with np.errstate(divide="ignore"):
        per_arm = np.where(counts > 0, spec.sigma2 / np.maximum(counts, 1e-300), np.inf)
    return float(per_arm.sum(axis=1).max())


def worst_case_pics_loss(spec: DatasetSpec, counts) -> float:
    """Worst case over subpopulations of the exact misselection probability
    at the given counts, using the true means and variances.

    Rows containing a zero count contribute the +inf sentinel.
    """
    counts = np.asarray(counts, dtype=float)
    zero_rows = (counts <= 0).any(axis=1)
    if zero_rows.all():
        return float("inf")
    safe_counts = np.where(counts > 0, counts, 1.0)
    losses = _pics_loss_rows(spec.mu, spec.sigma2, safe_counts)
    losses = np.where(zero_rows, np.inf, losses)
    return float(losses.max())
