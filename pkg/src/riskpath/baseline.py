"""Exhaustive baseline: estimate VaR on every path by direct rollouts."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Hashable

import numpy as np

from .bucketed import RiskConfig, VarResult
from .graph import AgentGraph, Path, check_full_path, enumerate_paths, path_edges, validate
from .quantile import empirical_quantile
from .sampling import SOURCE_LABEL, SeedDerivation, loss_of, sample_edge

BASELINE = "baseline"


@dataclass(frozen=True)
class PathEstimate:
    path: Path
    q: float
    n: int


def rollout_path(graph: AgentGraph, path: Path, n: int, seed: SeedDerivation | int,
                 context: Hashable = "rollout", index: int = 0) -> np.ndarray:
    """``n`` end-to-end draws along ``path``; each entry is the max edge loss.

    Edge ``e`` uses stream ``(e.id, context, index)`` and the source input
    uses ``("__source__", context, index)``.
    """
    if not isinstance(seed, SeedDerivation):
        seed = SeedDerivation(seed)
    check_full_path(graph, path)
    x = graph.initial.sample(n, seed.stream(SOURCE_LABEL, context, index))
    worst = np.full(n, -np.inf)
    for edge in path_edges(graph, path):
        traces, x = sample_edge(edge, x, seed.stream(edge.id, context, index))
        np.maximum(worst, loss_of(edge, traces), out=worst)
    return worst


def baseline_context(path_index: int) -> tuple[str, int]:
    return (BASELINE, path_index)


def baseline_var(graph: AgentGraph, config: RiskConfig, *, check: bool = True) -> VarResult:
    """Minimum empirical (1 - alpha)-quantile over all enumerated paths."""
    if check:
        validate(graph)
    t0 = time.perf_counter()
    paths = enumerate_paths(graph, cap=config.path_cap)
    seed = SeedDerivation(config.seed)
    estimates = []
    for i, p in enumerate(paths):
        losses = rollout_path(graph, p, config.samples, seed, baseline_context(i))
        estimates.append(PathEstimate(p, empirical_quantile(losses, 1.0 - config.alpha), config.samples))
    best = min(range(len(estimates)), key=lambda i: (estimates[i].q, i))
    return VarResult(
        estimate=estimates[best].q,
        path=estimates[best].path,
        allocation=None,
        algorithm=BASELINE,
        config=config,
        diagnostics={"paths_evaluated": len(paths)},
        path_estimates=[(e.path, e.q) for e in estimates],
        seconds=time.perf_counter() - t0,
    )
