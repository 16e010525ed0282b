"""Randomized response, PRAM, differential-privacy and t-closeness audits,
and permutation-based calibration for categorical and numeric microdata."""

__version__ = "0.1.0"

from .closeness import (
    ClosenessReport,
    check_t_closeness,
    cluster_deniability,
    implied_dp_epsilon,
    max_ratio_distance,
    t_from_epsilon,
)
from .domain import (
    Attribute,
    CategoricalDomain,
    Distribution,
    MicrodataTable,
    RawEstimate,
    TransitionMatrix,
    empirical_distribution,
    validate_transition_matrix,
)
from .dp_audit import DpAuditResult, check_epsilon_rr, deniability_at_epsilon, min_epsilon_rr
from .estimators import PRAMTransformer, ProportionEstimator, ReverseMapper
from .permutation import (
    DvfVerdict,
    PermutationProfile,
    check_dvf_privacy,
    decompose,
    power_mean,
    pram_apply,
    rank,
    reverse_map,
    risk_and_loss,
)
from .randomized_response import (
    SecrecyReport,
    deniability_entropy,
    design_uniform_stay,
    estimate_true_proportions,
    posterior,
    project_to_simplex,
    randomize,
    reported_distribution,
    secrecy_report,
)

__all__ = [
    "Attribute", "CategoricalDomain", "ClosenessReport", "Distribution", "DpAuditResult",
    "DvfVerdict", "MicrodataTable", "PRAMTransformer", "PermutationProfile",
    "ProportionEstimator", "RawEstimate", "ReverseMapper", "SecrecyReport",
    "TransitionMatrix", "check_dvf_privacy", "check_epsilon_rr", "check_t_closeness",
    "cluster_deniability", "decompose", "deniability_at_epsilon", "deniability_entropy",
    "design_uniform_stay", "empirical_distribution", "estimate_true_proportions",
    "implied_dp_epsilon", "max_ratio_distance", "min_epsilon_rr", "posterior", "power_mean",
    "pram_apply", "project_to_simplex", "randomize", "rank", "reported_distribution",
    "reverse_map", "risk_and_loss", "secrecy_report", "t_from_epsilon",
    "validate_transition_matrix",
]
