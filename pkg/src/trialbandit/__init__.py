"""Budgeted minimax bandit allocation for subpopulation-stratified trials.

The package models a trial as C subpopulation bandits with K treatment arms
each and a hard recruitment budget.  It provides closed-form oracle
allocations and worst-case loss evaluators for two objectives (treatment-
effect variance and probability of incorrect selection), five online
allocation policies, and a deterministic replication simulator that emits
loss-versus-budget experiment CSVs.
"""

from .datasets import builtin_dataset, dataset_names
from .experiments import ExperimentPlan, csv_header, run_experiment, write_experiment_csv
from .model import (
    ArmId,
    ArmStats,
    BudgetExhaustedError,
    DatasetSpec,
    TrialState,
    new_trial_state,
)
from .oracle import (
    GAP_FLOOR,
    PicsWeightRow,
    exact_pics_loss,
    normal_cdf,
    pics_surrogate_allocation,
    pics_surrogate_row_loss,
    pics_weight_matrix,
    pics_weight_row,
    variance_oracle_allocation,
    variance_oracle_loss,
    worst_case_pics_loss,
    worst_case_variance_loss,
)
from .policies import (
    POLICY_NAMES,
    PolicyConfig,
    aarandom_select,
    areoa_weights,
    default_ordering,
    epsilon_greedy_sample,
    gafs_max_select,
    init_phase_sequence,
    make_policy,
    minmaxpics_grp_select,
    minmaxpics_seq_weights,
    minmaxpics_subpop_weights,
    uniform_weights,
)
from .simulate import (
    OBJECTIVES,
    LossTrajectory,
    ReplicationSet,
    RunConfig,
    default_checkpoints,
    replicate,
    run_trial,
    sample_response,
)

__version__ = "0.1.0"

__all__ = [
    "ArmId",
    "ArmStats",
    "BudgetExhaustedError",
    "DatasetSpec",
    "ExperimentPlan",
    "GAP_FLOOR",
    "LossTrajectory",
    "OBJECTIVES",
    "POLICY_NAMES",
    "PicsWeightRow",
    "PolicyConfig",
    "ReplicationSet",
    "RunConfig",
    "TrialState",
    "aarandom_select",
    "areoa_weights",
    "builtin_dataset",
    "csv_header",
    "dataset_names",
    "default_checkpoints",
    "default_ordering",
    "epsilon_greedy_sample",
    "exact_pics_loss",
    "gafs_max_select",
    "init_phase_sequence",
    "make_policy",
    "minmaxpics_grp_select",
    "minmaxpics_seq_weights",
    "minmaxpics_subpop_weights",
    "new_trial_state",
    "normal_cdf",
    "pics_surrogate_allocation",
    "pics_surrogate_row_loss",
    "pics_weight_matrix",
    "pics_weight_row",
    "replicate",
    "run_experiment",
    "run_trial",
    "sample_response",
    "uniform_weights",
    "variance_oracle_allocation",
    "variance_oracle_loss",
    "worst_case_pics_loss",
    "worst_case_variance_loss",
    "write_experiment_csv",
]
