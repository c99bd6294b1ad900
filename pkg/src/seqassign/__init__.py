"""Exact engine for discrete stochastic sequential assignment.

Build optimal threshold tables, compute optimal placement locations and
their closed-form large-board profile, cross-check against a brute-force
oracle, and evaluate policies by seeded Monte Carlo.  The ``assign`` CLI
and the HTTP game-advisor service are in :mod:`seqassign.cli` and
:mod:`seqassign.service`.
"""

from .analysis import (
    ConvergenceReport,
    ConvergenceRow,
    continuity_audit,
    convergence_csv,
    convergence_study,
    rate_csv,
    rate_table,
)
from .distribution import (
    AsymptoticProfile,
    DiscreteDistribution,
    asymptotic_profile,
    cdf,
    fair_dice,
    kl_bernoulli,
    load_distribution,
    make_distribution,
    rate_minus,
    rate_plus,
    truncated_mean,
)
from .errors import SeqAssignError
from .oracle import Agreement, SubsetValueTable, oracle_agreement, oracle_value
from .policy_engine import (
    LocationVector,
    ThresholdRow,
    ThresholdTable,
    advise,
    build_table,
    location_matrix,
    locations,
    next_row,
    remaining_value,
)
from .simulator import (
    GameRecord,
    PolicySpec,
    SummaryStats,
    make_policy,
    make_rewards,
    monte_carlo,
    run_game,
)

__version__ = "0.1.0"

__all__ = [
    "Agreement",
    "AsymptoticProfile",
    "ConvergenceReport",
    "ConvergenceRow",
    "DiscreteDistribution",
    "GameRecord",
    "LocationVector",
    "PolicySpec",
    "SeqAssignError",
    "SubsetValueTable",
    "SummaryStats",
    "ThresholdRow",
    "ThresholdTable",
    "advise",
    "asymptotic_profile",
    "build_table",
    "cdf",
    "continuity_audit",
    "convergence_csv",
    "convergence_study",
    "fair_dice",
    "kl_bernoulli",
    "load_distribution",
    "location_matrix",
    "locations",
    "make_distribution",
    "make_policy",
    "make_rewards",
    "monte_carlo",
    "next_row",
    "oracle_agreement",
    "oracle_value",
    "rate_csv",
    "rate_minus",
    "rate_plus",
    "rate_table",
    "remaining_value",
    "run_game",
    "truncated_mean",
]
