"""Prophet-inequality instances, gamblers, the OCRS reduction and the high-girth construction."""
from .distributions import DiscreteDistribution, ValueTable
from .hard import HardGirthInstance, build_hard_instance, default_gamblers, girth_lowerbound_report, split_graph
from .harness import RatioReport, best_ratio, run_policies
from .instance import (GamblerSpec, ProphetInstance, kfold_view, offline_opt, offline_opt_batch, online_greedy)
from .reduction import ReductionPolicy, activation_rate, estimate_marginals, ocrs_to_prophet

__all__ = [
    "DiscreteDistribution", "ValueTable", "HardGirthInstance", "build_hard_instance", "default_gamblers",
    "girth_lowerbound_report", "split_graph", "RatioReport", "best_ratio", "run_policies", "GamblerSpec",
    "ProphetInstance", "kfold_view", "offline_opt", "offline_opt_batch", "online_greedy", "ReductionPolicy",
    "activation_rate", "estimate_marginals", "ocrs_to_prophet",
]
