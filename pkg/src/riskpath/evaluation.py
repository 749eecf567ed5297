"""Coverage on fresh rollouts, analytic path VaR and theorem-bound verdicts."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .baseline import baseline_var, rollout_path
from .benchgen import SUITE, make_chain, replicate_path
from .bucketed import RiskConfig, VarResult, bucketed_var
from .errors import InvalidParams, UnsupportedEdgeKind
from .graph import AgentGraph, Path, check_full_path, enumerate_paths, path_edges
from .quantile import TheoremBounds, clopper_pearson, dkw_gamma
from .sampling import AgentSpec, SeedDerivation

COVERAGE = "coverage"
BISECT_TOL = 1e-8


# --- coverage ------------------------------------------------------------------

@dataclass
class CoverageReport:
    estimate: float
    path: Path
    n: int
    covered: int
    coverage: float
    ci: tuple[float, float]
    target: float
    verdicts: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        q = self.estimate
        return {
            "estimate": q if math.isfinite(q) else ("inf" if q > 0 else "-inf"),
            "path": list(self.path.vertices),
            "n": self.n,
            "covered": self.covered,
            "coverage": self.coverage,
            "ci": list(self.ci),
            "target": self.target,
            "verdicts": self.verdicts,
        }

    def percent(self) -> str:
        """Coverage in the ``89.77 [89.15, 90.35]`` style."""
        return format_percent(self.coverage, self.ci)


def format_percent(coverage: float, ci: tuple[float, float]) -> str:
    return f"{100 * coverage:.2f} [{100 * ci[0]:.2f}, {100 * ci[1]:.2f}]"


def coverage(graph: AgentGraph, path: Path, q: float, N: int, seed: SeedDerivation | int,
             alpha: float = 0.1) -> CoverageReport:
    """Fraction of ``N`` fresh path-loss draws at or below ``q``, with a 95% CP interval.

    Rollouts use the ``"coverage"`` context, which no estimation stream uses.
    """
    if int(N) != N or N < 1:
        raise InvalidParams(f"coverage needs N >= 1, got {N}")
    check_full_path(graph, path)
    losses = rollout_path(graph, path, int(N), seed, COVERAGE, 0)
    covered = int(np.count_nonzero(losses <= q))
    return CoverageReport(float(q), path, int(N), covered, covered / N,
                          clopper_pearson(covered, int(N)), 1.0 - alpha)


# --- analytic oracle -----------------------------------------------------------

@dataclass(frozen=True)
class EdgeLaw:
    """Marginal loss law of one edge; ``latent`` edges share the source input."""

    kind: str
    p: dict[str, float]
    neg_inf: bool = False
    latent: bool = False

    def cdf(self, y: float) -> float:
        if self.neg_inf:
            return 1.0
        k, p = self.kind, self.p
        if k == "constant":
            return 1.0 if y >= p["value"] else 0.0
        if k == "uniform":
            return min(1.0, max(0.0, (y - p["low"]) / (p["high"] - p["low"])))
        if k in ("gaussian", "latent-correlated"):
            return float(special.ndtr((y - p["mu"]) / p["sigma"]))
        if k == "exponential":
            return 0.0 if y < p["loc"] else float(-math.expm1(-p["rate"] * (y - p["loc"])))
        if k == "shifted-min-distance":
            z = (y - p["shift"]) / p["scale"] + 1.0
            return min(1.0, max(0.0, z)) ** p["count"]
        raise UnsupportedEdgeKind(k)  # pragma: no cover

    def quantile(self, level: float) -> float:
        """Smallest ``y`` with ``cdf(y) >= level``."""
        if self.neg_inf:
            return -math.inf
        k, p = self.kind, self.p
        if k == "constant":
            return p["value"]
        if k == "uniform":
            return p["low"] + level * (p["high"] - p["low"])
        if k in ("gaussian", "latent-correlated"):
            return p["mu"] + p["sigma"] * float(special.ndtri(level))
        if k == "exponential":
            return p["loc"] - math.log1p(-level) / p["rate"] if level < 1 else math.inf
        if k == "shifted-min-distance":
            return p["shift"] - p["scale"] * (1.0 - level ** (1.0 / p["count"]))
        raise UnsupportedEdgeKind(k)  # pragma: no cover


class AnalyticOracle:
    """Exact path-loss CDFs for graphs of analytic, independent agents.

    The path CDF is the product of edge CDFs.  Latent-correlated edges are
    the one dependent family: each is ``mu + sigma (sqrt(rho) Z + sqrt(1-rho) eps)``
    where ``Z`` is the source input, so their joint CDF is integrated over
    ``Z`` (closed form for ``rho = 1``).  Empirical agents, carry losses and
    latent edges whose input is not the untouched standard-normal source
    input raise :class:`UnsupportedEdgeKind`.
    """

    def __init__(self, graph: AgentGraph):
        self.graph = graph
        self._laws: dict[tuple[str, str], EdgeLaw] = {}

    def law(self, edge) -> EdgeLaw:
        law = self._laws.get(edge.pair)
        if law is None:
            law = self._laws[edge.pair] = _edge_law(edge.agent)
        return law

    def _path_laws(self, path: Path | Sequence[str]) -> list[EdgeLaw]:
        laws = []
        source_intact = True
        for e in path_edges(self.graph, path):
            law = self.law(e)
            if law.latent and not law.neg_inf:
                if not source_intact or not _standard_normal_source(self.graph):
                    raise UnsupportedEdgeKind(
                        f"latent-correlated edge {e.id} is not fed the standard-normal source input")
            if e.agent.output_rule != "passthrough":
                source_intact = False
            laws.append(law)
        return laws

    def path_cdf(self, path: Path | Sequence[str], y: float) -> float:
        return _path_cdf(self._path_laws(path), y)

    def path_var(self, path: Path | Sequence[str], level: float) -> float:
        return _var_from_laws(self._path_laws(path), level)

    def optimal_path(self, alpha: float, cap: int | None = None) -> tuple[Path, float]:
        """Analytic minimiser of ``VaR_alpha`` over all paths (first on ties)."""
        paths = enumerate_paths(self.graph) if cap is None else enumerate_paths(self.graph, cap)
        values = [self.path_var(p, 1.0 - alpha) for p in paths]
        i = min(range(len(paths)), key=lambda j: (values[j], j))
        return paths[i], values[i]


def _standard_normal_source(graph: AgentGraph) -> bool:
    init = graph.initial
    return init.kind == "gaussian" and dict(init.params) == {"mu": 0.0, "sigma": 1.0}


def _edge_law(spec: AgentSpec) -> EdgeLaw:
    if spec.loss == "carry":
        raise UnsupportedEdgeKind("carry losses depend on upstream outputs")
    if spec.loss == "neg_inf":
        return EdgeLaw(spec.kind, dict(spec.params), neg_inf=True)
    if spec.kind == "empirical":
        raise UnsupportedEdgeKind("empirical agents have no analytic CDF")
    p = dict(spec.params)
    latent = spec.kind == "latent-correlated" and p["rho"] > 0.0
    return EdgeLaw(spec.kind, p, latent=latent)


def _path_cdf(laws: list[EdgeLaw], y: float) -> float:
    indep = 1.0
    lat = []
    for law in laws:
        if law.latent and not law.neg_inf:
            lat.append(law)
        else:
            indep *= law.cdf(y)
    if not lat:
        return indep
    mu = np.array([l.p["mu"] for l in lat])
    sig = np.array([l.p["sigma"] for l in lat])
    rho = np.array([l.p["rho"] for l in lat])
    full = rho >= 1.0
    # comonotone members: max <= y  iff  Z <= min (y - mu) / sigma
    zcap = np.min((y - mu[full]) / sig[full]) if full.any() else math.inf
    part = ~full
    if not part.any():
        return indep * float(special.ndtr(zcap))
    # the rest are independent given Z ~ N(0, 1); integrate Z up to zcap
    s = np.sqrt(rho[part])
    c = np.sqrt(1.0 - rho[part])
    a = (y - mu[part]) / sig[part]

    def f(z):
        return math.exp(-0.5 * z * z) * float(special.ndtr((a - s * z) / c).prod())

    val, _ = integrate.quad(f, -np.inf, zcap, epsabs=1e-13, limit=200)
    return indep * min(1.0, max(0.0, val / math.sqrt(2.0 * math.pi)))


def _var_from_laws(laws: list[EdgeLaw], level: float) -> float:
    if not 0.0 <= level <= 1.0:
        raise InvalidParams(f"level must be in [0, 1], got {level}")
    if not laws:
        raise InvalidParams("path has no edges")
    if level == 0.0:
        return -math.inf
    # F_max <= F_i gives the lower end; the union bound gives the upper end
    lo = max(l.quantile(level) for l in laws)
    hi = max(l.quantile(1.0 - (1.0 - level) / len(laws)) for l in laws)
    if lo == -math.inf:
        return -math.inf
    if _path_cdf(laws, lo) >= level:
        return lo
    if not math.isfinite(hi):
        raise InvalidParams(f"path VaR at level {level} is unbounded")
    while hi - lo > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if _path_cdf(laws, mid) >= level:
            hi = mid
        else:
            lo = mid
    return hi


def analytic_var(oracle: AnalyticOracle, path: Path | Sequence[str], level: float) -> float:
    """Smallest ``x`` with ``P(path loss <= x) >= level``, to 1e-8."""
    return oracle.path_var(path, level)


# --- theorem verdicts ----------------------------------------------------------

@dataclass(frozen=True)
class TheoremVerdict:
    thm1_lower_ok: bool
    thm2_upper_ok: bool | None
    estimate: float
    gamma: float
    lower_bound: float
    upper_bound: float | None
    slack: float | None
    optimal_path: Path | None

    def to_dict(self) -> dict[str, Any]:
        def enc(x):
            if x is None or math.isfinite(x):
                return x
            return "inf" if x > 0 else "-inf"

        return {
            "thm1_lower_ok": self.thm1_lower_ok,
            "thm2_upper_ok": self.thm2_upper_ok,
            "gamma": self.gamma,
            "lower_bound": enc(self.lower_bound),
            "upper_bound": enc(self.upper_bound),
            "slack": self.slack,
            "optimal_path": None if self.optimal_path is None else list(self.optimal_path.vertices),
        }


def thm2_slack(oracle: AnalyticOracle, path: Path, config: RiskConfig) -> float:
    """``3 sqrt(ln 40 / 2n) + range / d``.

    ``range`` is the widest analytic spread ``Q_e(1 - alpha/d) - Q_e(1 - alpha)``
    over the edges of ``path``: the most one bucket of budget can move an edge
    quantile inside the allocation range.
    """
    a, d = config.alpha, config.buckets
    spread = 0.0
    for e in path_edges(oracle.graph, path):
        law = oracle.law(e)
        if law.neg_inf:
            continue
        spread = max(spread, law.quantile(1.0 - a / d) - law.quantile(1.0 - a))
    return 3.0 * math.sqrt(math.log(40.0) / (2.0 * config.samples)) + spread / d


def theorem_verdicts(result: VarResult, oracle: AnalyticOracle, config: RiskConfig | None = None,
                     check_upper: bool = True) -> TheoremVerdict:
    """Check ``q`` against the lower (DKW) and upper (independence) guarantees.

    The lower check compares with the returned path's analytic VaR at level
    ``1 - alpha - gamma``.  The upper check compares with the analytically
    optimal path's VaR at ``1 - alpha + alpha^2/2`` plus :func:`thm2_slack`.
    """
    config = config or result.config
    q = result.estimate
    nv = len(oracle.graph.vertices)
    bounds = TheoremBounds.compute(config.alpha, nv, config.samples, config.buckets, config.delta)
    lower = oracle.path_var(result.path, bounds.lower_level) if bounds.lower_level > 0 else -math.inf
    thm1 = bool(q >= lower)
    upper = slack = opt = None
    thm2 = None
    if check_upper:
        opt, _ = oracle.optimal_path(config.alpha, config.path_cap)
        slack = thm2_slack(oracle, opt, config)
        upper = oracle.path_var(opt, bounds.upper_level) + slack
        thm2 = bool(q <= upper)
    return TheoremVerdict(thm1, thm2, q, bounds.gamma, lower, upper, slack, opt)


def try_verdicts(result: VarResult, graph: AgentGraph, config: RiskConfig | None = None) -> dict[str, Any]:
    """Verdict record, or ``{"unsupported": reason}`` when no oracle applies."""
    try:
        return theorem_verdicts(result, AnalyticOracle(graph), config).to_dict()
    except UnsupportedEdgeKind as exc:
        return {"unsupported": str(exc)}


# --- experiments ---------------------------------------------------------------

SWEEP_HEADER = ("param", "estimate", "coverage", "ci_lo", "ci_hi", "seconds")


@dataclass(frozen=True)
class SweepRow:
    param: int
    estimate: float
    coverage: float
    ci_lo: float
    ci_hi: float
    seconds: float

    def as_tuple(self) -> tuple:
        return (self.param, self.estimate, self.coverage, self.ci_lo, self.ci_hi, self.seconds)


def _run_and_cover(graph: AgentGraph, config: RiskConfig, param: int, algorithm: str) -> SweepRow:
    run = bucketed_var if algorithm == "bucketed" else baseline_var
    res = run(graph, config)
    rep = coverage(graph, res.path, res.estimate, config.coverage_samples, config.seed, config.alpha)
    return SweepRow(param, res.estimate, rep.coverage, rep.ci[0], rep.ci[1], res.seconds)


def sweep(kind: str, values: Iterable[int], config: RiskConfig, graph: AgentGraph | None = None,
          algorithm: str = "bucketed") -> list[SweepRow]:
    """One row per parameter value.

    ``samples`` and ``buckets`` vary the config on ``graph`` (default: an
    8-edge uniform chain); ``agents`` replicates the base graph's first path
    ``k`` times.
    """
    base = graph if graph is not None else make_chain(8)
    rows = []
    for v in values:
        v = int(v)
        if kind == "samples":
            rows.append(_run_and_cover(base, _replace(config, samples=v), v, algorithm))
        elif kind == "buckets":
            rows.append(_run_and_cover(base, _replace(config, buckets=v), v, algorithm))
        elif kind == "agents":
            p = enumerate_paths(base, cap=config.path_cap)[0]
            rows.append(_run_and_cover(replicate_path(base, p, v), config, v, algorithm))
        else:
            raise InvalidParams(f"unknown sweep kind {kind!r}; choose samples, buckets or agents")
    return rows


def _replace(config: RiskConfig, **changes) -> RiskConfig:
    d = config.to_dict()
    d.update(changes)
    return RiskConfig(**d)


TABLE_HEADER = ("benchmark", "alpha", "buckets", "bucketed_estimate", "baseline_estimate",
                "bucketed_coverage", "baseline_coverage")


def table1(config: RiskConfig, names: Sequence[str] | None = None,
           suite: dict[str, tuple[Callable[[], AgentGraph], int]] | None = None) -> list[dict[str, Any]]:
    """Both algorithms on each benchmark analog with coverage and 95% intervals.

    The bucket count comes from the suite entry; every other setting from
    ``config``.
    """
    suite = suite or SUITE
    rows = []
    for name in names or list(suite):
        factory, d = suite[name]
        g = factory()
        cfg = _replace(config, buckets=d)
        t0 = time.perf_counter()
        out = {"benchmark": name, "alpha": cfg.alpha, "buckets": d}
        for algo, run in (("bucketed", bucketed_var), ("baseline", baseline_var)):
            res = run(g, cfg)
            rep = coverage(g, res.path, res.estimate, cfg.coverage_samples, cfg.seed, cfg.alpha)
            out[f"{algo}_estimate"] = res.estimate
            out[f"{algo}_coverage"] = rep.percent()
            out[f"{algo}_path"] = str(res.path)
        out["seconds"] = time.perf_counter() - t0
        rows.append(out)
    return rows


def format_table(rows: list[dict[str, Any]]) -> str:
    lines = ["\t".join(TABLE_HEADER)]
    for r in rows:
        cells = [r["benchmark"], f"{r['alpha']:g}", str(r["buckets"]),
                 f"{r['bucketed_estimate']:.4f}", f"{r['baseline_estimate']:.4f}",
                 r["bucketed_coverage"], r["baseline_coverage"]]
        lines.append("\t".join(cells))
    return "\n".join(lines)


__all__ = [
    "AnalyticOracle", "CoverageReport", "EdgeLaw", "SweepRow", "TheoremVerdict", "analytic_var",
    "coverage", "dkw_gamma", "format_percent", "format_table", "sweep", "table1",
    "theorem_verdicts", "thm2_slack", "try_verdicts",
]
