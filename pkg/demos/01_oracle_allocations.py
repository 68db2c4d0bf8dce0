"""Closed-form oracle allocations for both objectives.

Walks through what the allocation formulas do on three contrasting worlds:

* DS1: one subpopulation carries 10x the response variance of the rest,
  so the variance-optimal split concentrates most of the budget there.
* DS21: every subpopulation poses the same easy selection problem, so the
  selection-optimal split is identical across rows, and within a row the
  best-looking treatment is sampled more than the clearly inferior ones.
* DS22: only the first subpopulation has a small (hard) treatment gap, and
  the selection-optimal split sends almost the entire budget to it.

Run:  python demos/01_oracle_allocations.py
"""

import numpy as np

from trialbandit import (
    builtin_dataset,
    exact_pics_loss,
    pics_surrogate_allocation,
    pics_surrogate_row_loss,
    variance_oracle_allocation,
    variance_oracle_loss,
    worst_case_variance_loss,
)


def show_matrix(label, matrix):
    print(f"{label}:")
    for row in matrix:
        print("   " + "  ".join(f"{v:9.3f}" for v in row))


def main():
    print("=" * 72)
    print("Variance objective on DS1 (budget 200)")
    print("=" * 72)
    ds1 = builtin_dataset("DS1")
    alloc = variance_oracle_allocation(ds1, 200)
    show_matrix("optimal allocation (subpopulations x treatments)", alloc)
    print(f"optimal worst-case loss: {variance_oracle_loss(ds1, 200):.6f}")
    per_row = (ds1.sigma2 / alloc).sum(axis=1)
    print("per-subpopulation losses (equalized by construction):",
          np.round(per_row, 9).tolist())
    uniform = np.full(alloc.shape, 200 / alloc.size)
    print(f"uniform allocation for comparison: {worst_case_variance_loss(ds1, uniform):.1f}")
    print("oracle loss scales as 1/budget:",
          [round(variance_oracle_loss(ds1, n), 2) for n in (50, 100, 200, 400)])

    print()
    print("=" * 72)
    print("Selection objective on DS21 and DS22 (budget 200)")
    print("=" * 72)
    for name in ("DS21", "DS22"):
        spec = builtin_dataset(name)
        alloc = pics_surrogate_allocation(spec, 200)
        show_matrix(f"{name} surrogate-optimal allocation", alloc)
        sigma = np.sqrt(spec.sigma2)
        surrogate = [
            pics_surrogate_row_loss(spec.mu[i], sigma[i], alloc[i])
            for i in range(spec.n_subpops)
        ]
        exact = [
            exact_pics_loss(spec.mu[i], sigma[i], alloc[i])
            for i in range(spec.n_subpops)
        ]
        print(f"  surrogate per-row losses (equalized): {np.round(surrogate, 6).tolist()}")
        print(f"  exact misselection probabilities:     {np.round(exact, 6).tolist()}")
        print()


if __name__ == "__main__":
    main()
