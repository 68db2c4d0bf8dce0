"""Acceptance suite.

One test per acceptance criterion, each printing a single
``[acceptance] <criterion>: PASS|FAIL (<measured detail>)`` line before
asserting, so a full run (``pytest tests/test_acceptance.py -v -s``) yields
one status line per criterion.

Criterion 5 (selection-error threshold crossings on DS2-CBASP) encodes the
stated target windows verbatim; see the repository notes for the analysis
of its status.
"""

import numpy as np
import pytest
from scipy.optimize import minimize

from trialbandit import (
    DatasetSpec,
    ExperimentPlan,
    PolicyConfig,
    RunConfig,
    TrialState,
    areoa_weights,
    builtin_dataset,
    default_ordering,
    exact_pics_loss,
    make_policy,
    minmaxpics_seq_weights,
    minmaxpics_subpop_weights,
    normal_cdf,
    pics_surrogate_allocation,
    pics_surrogate_row_loss,
    replicate,
    run_trial,
    variance_oracle_allocation,
    variance_oracle_loss,
    write_experiment_csv,
)


def _report(criterion: str, ok: bool, detail: str):
    print(f"[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{criterion}: {detail}"


def _random_instance(rng):
    n_subpops = int(rng.integers(1, 9))
    n_treatments = int(rng.integers(2, 4))
    mu = np.array(
        [rng.choice(21, size=n_treatments, replace=False) for _ in range(n_subpops)],
        dtype=float,
    )
    sigma2 = rng.uniform(1.0, 1000.0, size=(n_subpops, n_treatments))
    p = rng.uniform(0.1, 1.0, size=n_subpops)
    return DatasetSpec("random", p / p.sum(), mu, sigma2)


def test_criterion_1_oracle_closed_form():
    spec = builtin_dataset("DS1")
    alloc = variance_oracle_allocation(spec, 200)
    expected = np.array([[2000 / 26] * 2] + [[200 / 26] * 2] * 3)
    alloc_err = float(np.abs(alloc - expected).max())
    loss = variance_oracle_loss(spec, 200)

    def objective(flat):
        return (spec.sigma2 / flat.reshape(4, 2)).sum(axis=1).max()

    res = minimize(
        objective,
        np.full(8, 25.0),
        method="SLSQP",
        bounds=[(1e-6, None)] * 8,
        constraints=({"type": "eq", "fun": lambda x: x.sum() - 200.0},),
        options={"maxiter": 500, "ftol": 1e-12},
    )
    ok = (
        alloc_err <= 1e-6
        and abs(loss - 26.0) <= 1e-9
        and res.success
        and objective(alloc.ravel()) <= res.fun + 1e-6
    )
    _report(
        "criterion 1: oracle closed form",
        ok,
        f"max alloc err {alloc_err:.2e}, loss {loss!r}, minimizer obj {res.fun:.9f}",
    )


def test_criterion_2_kkt_equalization_and_optimality():
    rng = np.random.default_rng(2202)
    budget = 100.0
    worst_spread_var = worst_spread_pics = 0.0
    dominated = True
    for _ in range(50):
        spec = _random_instance(rng)
        shape = spec.mu.shape
        feasible = rng.exponential(size=(10_000, spec.n_arms))
        feasible = feasible / feasible.sum(axis=1, keepdims=True) * budget
        counts = feasible.reshape(-1, *shape)

        alloc = variance_oracle_allocation(spec, budget)
        per_row = (spec.sigma2 / alloc).sum(axis=1)
        worst_spread_var = max(worst_spread_var, float(per_row.max() - per_row.min()))
        random_obj = (spec.sigma2[None] / counts).sum(axis=2).max(axis=1)
        dominated &= bool(per_row.max() <= random_obj.min() + 1e-12)

        surrogate = pics_surrogate_allocation(spec, budget)
        sigma = np.sqrt(spec.sigma2)
        row_losses = np.array([
            pics_surrogate_row_loss(spec.mu[i], sigma[i], surrogate[i])
            for i in range(shape[0])
        ])
        worst_spread_pics = max(
            worst_spread_pics, float(row_losses.max() - row_losses.min())
        )
        best = spec.mu.argmax(axis=1)
        rows = np.arange(shape[0])
        inferior = np.ones(shape, dtype=bool)
        inferior[rows, best] = False
        var_over_n = spec.sigma2[None] / counts
        gaps = (spec.mu[rows, best][:, None] - spec.mu)[inferior].reshape(shape[0], -1)
        terms = (
            var_over_n[:, inferior].reshape(-1, shape[0], shape[1] - 1)
            + var_over_n[:, rows, best][:, :, None]
        ) / gaps[None] ** 2
        random_surrogate_obj = terms.sum(axis=2).max(axis=1)
        dominated &= bool(row_losses.max() <= random_surrogate_obj.min() + 1e-12)

    ok = worst_spread_var <= 1e-9 and worst_spread_pics <= 1e-9 and dominated
    _report(
        "criterion 2: KKT equalization and optimality",
        ok,
        f"max equalization spread: variance {worst_spread_var:.2e}, "
        f"surrogate {worst_spread_pics:.2e}; dominates 1e4 random feasible "
        f"allocations per instance: {dominated}",
    )


def test_criterion_3_pics_quadrature():
    rng = np.random.default_rng(33)
    worst_two_arm = 0.0
    for _ in range(100):
        mu = rng.uniform(0.0, 20.0, size=2)
        sigma = np.sqrt(rng.uniform(1.0, 1000.0, size=2))
        n = rng.uniform(2.0, 200.0, size=2)
        closed = normal_cdf(-abs(mu[0] - mu[1]) / np.sqrt((sigma**2 / n).sum()))
        worst_two_arm = max(worst_two_arm, abs(exact_pics_loss(mu, sigma, n) - closed))

    mc_ok = True
    mc_detail = []
    three_arm_rows = [
        (np.array([20.0, 10.0, 10.0]), np.sqrt(np.full(3, 50.0)), np.full(3, 10.0)),
        (np.array([12.0, 9.0, 7.0]), np.sqrt([40.0, 90.0, 20.0]), np.array([8.0, 20.0, 12.0])),
        (np.array([5.0, 4.0, 1.0]), np.sqrt([100.0, 30.0, 60.0]), np.array([30.0, 15.0, 9.0])),
    ]
    for k, (mu, sigma, n) in enumerate(three_arm_rows):
        loss = exact_pics_loss(mu, sigma, n)
        mc_rng = np.random.default_rng(1 + k)
        draws = mc_rng.normal(mu, sigma / np.sqrt(n), size=(10**6, 3))
        best = int(mu.argmax())
        others = [j for j in range(3) if j != best]
        mc = (draws[:, others].max(axis=1) >= draws[:, best]).mean()
        se = np.sqrt(mc * (1 - mc) / 10**6)
        mc_ok &= abs(loss - mc) <= 3 * se
        mc_detail.append(f"{abs(loss - mc) / se:.2f}se")

    bound_ok = True
    for _ in range(100):
        k = int(rng.integers(2, 4))
        mu = rng.choice(21, size=k, replace=False).astype(float)
        sigma = np.sqrt(rng.uniform(1.0, 1000.0, size=k))
        n = rng.uniform(2.0, 200.0, size=k)
        bound = pics_surrogate_row_loss(mu, sigma, n)
        if bound <= 1.0:
            bound_ok &= exact_pics_loss(mu, sigma, n) <= bound + 1e-12

    ok = worst_two_arm <= 1e-9 and mc_ok and bound_ok
    _report(
        "criterion 3: misselection quadrature",
        ok,
        f"worst two-arm err {worst_two_arm:.2e}; MC deviations {', '.join(mc_detail)}; "
        f"Boole/Chebyshev bound respected: {bound_ok}",
    )


def test_criterion_4_ds2_policy_ordering():
    spec = builtin_dataset("DS2")
    results = {}
    for policy in ("areoa", "aarandom"):
        config = RunConfig(
            dataset=spec, policy=policy, budget=200, objective="variance", seed=2026
        )
        outcome = replicate(config, 100)
        finals = np.array([run.losses[-1] for run in outcome.runs])
        results[policy] = (finals.mean(), finals.var(ddof=1) / finals.size)
    oracle = variance_oracle_loss(spec, 200)
    gap = results["aarandom"][0] - results["areoa"][0]
    se_diff = np.sqrt(results["areoa"][1] + results["aarandom"][1])
    ok = (
        oracle < results["areoa"][0] < results["aarandom"][0]
        and gap > 2 * se_diff
    )
    _report(
        "criterion 4: DS2 ordering oracle < areoa < aarandom",
        ok,
        f"oracle {oracle:.1f}, areoa {results['areoa'][0]:.1f}, "
        f"aarandom {results['aarandom'][0]:.1f}, gap {gap:.1f} vs 2se {2 * se_diff:.1f}",
    )


def _error_crossing(result, threshold=0.20):
    for n, err in zip(result.checkpoints, result.empirical_error_max):
        if err <= threshold:
            return int(n)
    return None


def test_criterion_5_cbasp_error_thresholds():
    spec = builtin_dataset("DS2-CBASP")
    crossings = {}
    for policy in ("minmaxpics-seq", "aarandom"):
        config = RunConfig(
            dataset=spec, policy=policy, budget=700, objective="pics", seed=700
        )
        crossings[policy] = _error_crossing(replicate(config, 100))
    seq, aar = crossings["minmaxpics-seq"], crossings["aarandom"]
    ok = (
        seq is not None
        and aar is not None
        and 255 * 0.8 <= seq <= 255 * 1.2
        and 500 * 0.8 <= aar <= 500 * 1.2
    )
    _report(
        "criterion 5: DS2-CBASP 20% error thresholds",
        ok,
        f"first n with max-subpopulation error <= 0.20: minmaxpics-seq {seq} "
        f"(target 255 +- 20%), aarandom {aar} (target 500 +- 20%)",
    )


def test_criterion_6_ds21_easy_case():
    spec = builtin_dataset("DS21")
    finals = {}
    for policy in ("aarandom", "minmaxpics-seq", "minmaxpics-grp"):
        config = RunConfig(
            dataset=spec, policy=policy, budget=200, objective="pics", seed=21
        )
        outcome = replicate(config, 100)
        finals[policy] = float(outcome.empirical_error_max[-1])
    ok = all(err <= 0.05 for err in finals.values())
    _report(
        "criterion 6: DS21 low error by budget 200",
        ok,
        ", ".join(f"{k} {v:.3f}" for k, v in finals.items()),
    )


def test_criterion_7_gafs_ordering_sensitivity():
    spec = builtin_dataset("DS3")
    per_subpop = {}
    for label, ordering in (
        ("default", None),
        ("reversed", default_ordering(8, 2)[::-1]),
    ):
        config = RunConfig(
            dataset=spec,
            policy="gafs-max",
            budget=200,
            seed=3,
            policy_config=PolicyConfig(ordering=ordering),
        )
        outcome = replicate(config, 100)
        totals = np.stack([run.final_counts.sum(axis=1) for run in outcome.runs])
        per_subpop[label] = (totals.mean(axis=0), totals.var(ddof=1, axis=0) / totals.shape[0])
    diff = per_subpop["default"][0] - per_subpop["reversed"][0]
    se = np.sqrt(per_subpop["default"][1] + per_subpop["reversed"][1])
    significant = np.abs(diff) > np.maximum(3 * se, 1e-12)
    ok = bool(significant.any())
    _report(
        "criterion 7: GAFS-MAX ordering sensitivity on DS3",
        ok,
        f"largest mean allocation difference {np.abs(diff).max():.1f} pulls "
        f"(3se {3 * se[np.abs(diff).argmax()]:.2f}), "
        f"{int(significant.sum())}/8 subpopulations significant",
    )


def test_criterion_8_property_suites(tmp_path):
    # (a) every weights operation yields a distribution on 1e4 reachable states
    spec = builtin_dataset("DS21")
    states_checked = 0

    class Validating:
        def __init__(self):
            self.inner = make_policy("minmaxpics-seq", spec, PolicyConfig())

        def decide(self, state, rng):
            nonlocal states_checked
            for weights in (areoa_weights(state), minmaxpics_seq_weights(state)):
                assert (weights >= 0).all()
                assert abs(weights.sum() - 1.0) <= 1e-9
            marginals = minmaxpics_subpop_weights(state)
            assert (marginals >= 0).all() and abs(marginals.sum() - 1.0) <= 1e-9
            states_checked += 1
            return self.inner.decide(state, rng)

    for seed in range(80):
        config = RunConfig(dataset=spec, policy="minmaxpics-seq", budget=185, seed=seed)
        run_trial(config, policy=Validating())
    weights_ok = states_checked == 10_000

    # (b) one-pass statistics match the two-pass definition
    rng = np.random.default_rng(88)
    welford_ok = True
    for length in (10, 1000, 10_000):
        values = rng.normal(50.0, 20.0, size=length)
        state = TrialState(1, 2, length)
        for x in values:
            state.record_response((0, 0), float(x))
        stats = state.arm_stats((0, 0))
        welford_ok &= abs(stats.mean - values.mean()) <= 1e-10 * abs(values.mean())
        welford_ok &= abs(stats.variance - values.var(ddof=1)) <= 1e-10 * values.var(ddof=1)

    # (c) identical configuration yields byte-identical CSV, serial or parallel
    plan = dict(
        datasets=("DS1",), policies=("areoa",), budget=60, reps=4, seed=5,
        objective="variance", checkpoint_every=10,
    )
    first = write_experiment_csv(ExperimentPlan(**plan), tmp_path / "a.csv")
    second = write_experiment_csv(ExperimentPlan(**plan), tmp_path / "b.csv")
    parallel = write_experiment_csv(
        ExperimentPlan(**plan, workers=2), tmp_path / "c.csv"
    )
    csv_ok = (
        first.read_bytes() == second.read_bytes() == parallel.read_bytes()
    )

    ok = weights_ok and welford_ok and csv_ok
    _report(
        "criterion 8: property suites",
        ok,
        f"{states_checked} reachable states validated; one-pass vs two-pass ok: "
        f"{welford_ok}; byte-identical CSV (serial x2 + parallel): {csv_ok}",
    )
