"""Simulation, exact computation, and statistical verification toolkit for
a pair of mutually reinforcing random walkers.

Each walker repeats or reverses a uniformly drawn past step of its partner;
the package simulates the pair exactly, evaluates every closed-form
quantity of its limit theory (spectral parameters, weight schedules, limit
variances, tree-degree moments), and verifies the limit theorems at desk
scale against exact oracles and Monte Carlo ensembles.
"""

from ._kernels import backend as kernel_backend
from .params import DEFAULT_INIT, InitialCondition, ReinforcementParams
from .model import (
    PairState,
    Trajectory,
    martingale_component,
    simulate_pair,
    step_probabilities,
    write_trajectory_csv,
)
from .spectral import Regime, SpectralParams, spectral_params
from .theory import (
    exact_distribution_dp,
    fluctuation_law,
    lil_envelope,
    moment_recursion,
    predicted_variance,
)
from .ensemble import (
    EnsembleConfig,
    EnsembleSummary,
    construction_equivalence,
    estimate_w,
    fluctuation_experiment,
    ks_against_gaussian,
    ks_two_sample,
    lil_scan,
    run_ensemble,
)
from .tree import DegreeProfile, degree_histogram, grow, mean_square_statistic

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_INIT",
    "DegreeProfile",
    "EnsembleConfig",
    "EnsembleSummary",
    "InitialCondition",
    "PairState",
    "Regime",
    "ReinforcementParams",
    "SpectralParams",
    "Trajectory",
    "construction_equivalence",
    "degree_histogram",
    "estimate_w",
    "exact_distribution_dp",
    "fluctuation_experiment",
    "fluctuation_law",
    "grow",
    "kernel_backend",
    "ks_against_gaussian",
    "ks_two_sample",
    "lil_envelope",
    "lil_scan",
    "martingale_component",
    "mean_square_statistic",
    "moment_recursion",
    "predicted_variance",
    "run_ensemble",
    "simulate_pair",
    "spectral_params",
    "step_probabilities",
    "write_trajectory_csv",
]
