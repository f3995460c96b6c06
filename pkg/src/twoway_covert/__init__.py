"""Covert-communication regions, finite-blocklength information scalings,
and random-coding simulation for binary-input two-way channels."""

from .channel import (ChannelReport, ChannelSpecError, Distribution,
                      TwoWayChannel, check_assumptions, detect_alarm_symbols,
                      parse_channel, render_channel)
from .metrics import (CovertInputDesign, DesignError, InfoQuantities,
                      JointInputDist, bernstein_tail_bound,
                      build_design_joint, chi_squared, eavesdropper_marginal,
                      exact_finite_n_quantities, fit_scaling_exponent,
                      kl_divergence, leading_order_quantities,
                      total_variation)
from .regions import (BudgetPath, RegionPoint, RhoWeights, WeightBudget,
                      area_of_budget_path, capacity_region_point,
                      converse_frontier, optimize_budget_path,
                      pts_region_point, weight_budget)
from .simulate import (Codebook, CodebookSizes, ResolvabilityReport,
                       SimReport, chaining_bound, decoding_score,
                       estimate_error_probability,
                       exact_induced_distribution, generate_codebook,
                       rate_thresholds, resolvability_report)

__version__ = "0.1.0"

__all__ = [
    "BudgetPath", "ChannelReport", "ChannelSpecError", "Codebook",
    "CodebookSizes", "CovertInputDesign", "DesignError", "Distribution",
    "InfoQuantities", "JointInputDist", "RegionPoint", "ResolvabilityReport",
    "RhoWeights", "SimReport", "TwoWayChannel", "WeightBudget",
    "area_of_budget_path", "bernstein_tail_bound", "build_design_joint",
    "capacity_region_point", "chaining_bound", "check_assumptions",
    "chi_squared", "converse_frontier", "decoding_score",
    "detect_alarm_symbols", "eavesdropper_marginal",
    "estimate_error_probability", "exact_finite_n_quantities",
    "exact_induced_distribution", "fit_scaling_exponent",
    "generate_codebook", "kl_divergence", "leading_order_quantities",
    "optimize_budget_path", "parse_channel", "pts_region_point",
    "rate_thresholds", "render_channel", "resolvability_report",
    "total_variation", "weight_budget",
]
