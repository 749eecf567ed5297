"""Minimum value-at-risk paths in stochastic agent graphs."""

from .baseline import baseline_var, rollout_path
from .bucketed import RiskConfig, VarResult, bucketed_var, report_allocation
from .graph import AgentGraph, Edge, Path, enumerate_paths, topological_order, validate
from .quantile import clopper_pearson, dkw_gamma, empirical_quantile
from .sampling import AgentSpec, InitialSpec, SeedDerivation, derive_rng

__all__ = [
    "AgentGraph", "AgentSpec", "Edge", "InitialSpec", "Path", "RiskConfig", "SeedDerivation",
    "VarResult", "baseline_var", "bucketed_var", "clopper_pearson", "derive_rng", "dkw_gamma",
    "empirical_quantile", "enumerate_paths", "report_allocation", "rollout_path",
    "topological_order", "validate",
]
