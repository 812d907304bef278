"""Lundberg-type ruin bounds for discrete-time risk models with interest and m-dependent premiums and claims."""

from .adjustment import AdjustmentProblem, AdjustmentResult, Condition, InterestModel, lundberg_function, solve_adjustment
from .bounds import BoundReport, lundberg_bound, min_useful_u, table1
from .dependence import DependenceSpec, generate_sequence, innovation_for_target, lag_correlation, split_subsequences
from .distributions import Deterministic, FiniteDiscrete, Gamma, Poisson, mean, mgf, mgf_domain_sup, sample
from .risk_models import (
    Model,
    RiskModelConfig,
    SimulationEstimate,
    SurplusPath,
    discounted_loss,
    estimate_ruin_curve,
    estimate_ruin_curves,
    estimate_ruin_probability,
    exponential_moment,
    exponential_moments,
    simulate_path,
)

__version__ = "0.1.0"
