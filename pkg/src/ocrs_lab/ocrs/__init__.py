"""Online contention resolution for extended k-fold unions."""
from .engine import (ORDER_POLICIES, LayeredPlan, OcrsRunLog, SelectabilityReport, estimate_selectability,
                     keep_probability, run_ocrs, simulate)
from .estimator import ExpectationEstimator, poisson_binomial
from .marginals import MarginalVector, certify, default_b, greedy_decompose, sample_active, uniform_cyclic
from .protection import ChainDecomposition, ProtectReport, build_chain, kfold_protect, modified_greedy_step, protect

__all__ = [
    "ORDER_POLICIES", "LayeredPlan", "OcrsRunLog", "SelectabilityReport", "estimate_selectability",
    "keep_probability", "run_ocrs", "simulate", "ExpectationEstimator", "poisson_binomial", "MarginalVector",
    "certify", "default_b", "greedy_decompose", "sample_active", "uniform_cyclic", "ChainDecomposition",
    "ProtectReport", "build_chain", "kfold_protect", "modified_greedy_step", "protect",
]
