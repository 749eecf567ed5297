"""Synthetic agent graphs shaped like the standard benchmark environments.

Edge agents are analytic distributions, so the true path VaR is computable
for every family except the carry-loss relay graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .errors import InvalidParams
from .graph import AgentGraph, Path, path_edges, validate
from .sampling import AgentSpec, InitialSpec

UNIFORM01 = AgentSpec.make("uniform", low=0.0, high=1.0)

SpecRule = AgentSpec | Sequence[AgentSpec] | Callable[..., AgentSpec] | None


def _pick(specs: SpecRule, count: int, i: int, *args) -> AgentSpec:
    if specs is None:
        return UNIFORM01
    if isinstance(specs, AgentSpec):
        return specs
    if callable(specs):
        return specs(i, *args)
    if len(specs) != count:
        raise InvalidParams(f"expected {count} agent specs, got {len(specs)}")
    return specs[i]


def _int_param(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise InvalidParams(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def make_chain(m: int, specs: SpecRule = None, initial: InitialSpec | None = None) -> AgentGraph:
    """Vertices ``v0..vm`` joined by ``m`` edges."""
    m = _int_param("m", m, 1)
    w = len(str(m))
    names = [f"v{i:0{w}d}" for i in range(m + 1)]
    edges = [(names[i], names[i + 1], _pick(specs, m, i)) for i in range(m)]
    return AgentGraph.build(names, edges, names[0], names[-1], initial)


def make_diamond_sequence(k: int, specs: SpecRule = None, initial: InitialSpec | None = None) -> AgentGraph:
    """``k`` diamonds in series: 3k+1 vertices, 4k edges, 2^k paths of 2k edges.

    Diamond ``i`` joins ``d{i}`` to ``d{i+1}`` through ``a{i}`` (top) and
    ``b{i}`` (bottom).  A callable ``specs`` is called as
    ``specs(edge_index, diamond, branch, step)`` with branch ``"a"``/``"b"``
    and step 0 (into the branch vertex) or 1 (out of it).
    """
    k = _int_param("k", k, 1)
    w = len(str(k))
    joins = [f"d{i:0{w}d}" for i in range(k + 1)]
    vertices = list(joins)
    edges = []
    for i in range(k):
        for branch in ("a", "b"):
            mid = f"{branch}{i:0{w}d}"
            vertices.append(mid)
            for step, (u, v) in enumerate(((joins[i], mid), (mid, joins[i + 1]))):
                idx = len(edges)
                spec = specs(idx, i, branch, step) if callable(specs) and not isinstance(specs, AgentSpec) \
                    else _pick(specs, 4 * k, idx)
                edges.append((u, v, spec))
    return AgentGraph.build(vertices, edges, joins[0], joins[-1], initial)


def make_two_path(num_vertices: int = 7, path_length: int = 5, shared: SpecRule = None,
                  top: SpecRule = None, bottom: SpecRule = None,
                  initial: InitialSpec | None = None) -> AgentGraph:
    """A shared prefix that splits into two disjoint branches meeting at the terminal.

    With ``V`` vertices and paths of ``L`` edges each branch has ``V - L``
    edges and the prefix ``2L - V``.
    """
    V = _int_param("num_vertices", num_vertices, 3)
    L = _int_param("path_length", path_length, 2)
    branch = V - L
    prefix = 2 * L - V
    if branch < 2 or prefix < 0:
        raise InvalidParams(f"no two-path graph with {V} vertices and paths of length {L}")
    pre = [f"p{i}" for i in range(prefix + 1)]
    vertices = list(pre)
    edges = [(pre[i], pre[i + 1], _pick(shared, prefix, i)) for i in range(prefix)]
    for name, rule in (("u", top), ("w", bottom)):
        mids = [f"{name}{i}" for i in range(1, branch)]
        vertices.extend(mids)
        chain = [pre[-1], *mids, "t"]
        edges.extend((chain[i], chain[i + 1], _pick(rule, branch, i)) for i in range(branch))
    vertices.append("t")
    return AgentGraph.build(vertices, edges, pre[0], "t", initial)


def replicate_path(graph: AgentGraph, path: Path, k: int) -> AgentGraph:
    """Chain whose edges are ``path``'s edges repeated ``k`` times.

    Repetition 0 keeps the original vertex names, repetition ``r`` suffixes
    them with ``@r``; every copy is a distinct edge and so draws from its own
    streams.
    """
    k = _int_param("k", k, 1)
    edges_in = path_edges(graph, path)
    if not edges_in:
        raise InvalidParams("cannot replicate an empty path")
    vertices = [path.vertices[0]]
    edges = []
    for r in range(k):
        for e in edges_in:
            name = e.dst if r == 0 else f"{e.dst}@{r}"
            edges.append((vertices[-1], name, e.agent))
            vertices.append(name)
    return AgentGraph.build(vertices, edges, vertices[0], vertices[-1], graph.initial)


def make_correlated_diamond(rho: float, other_mu: float = 0.5) -> AgentGraph:
    """Diamond whose top path has two losses sharing a standard-normal latent.

    The source input is the latent ``Z ~ N(0, 1)`` and is passed through
    unchanged.  Top edges: ``sqrt(rho) Z + sqrt(1 - rho) eps`` (pairwise
    correlation ``rho``).  Bottom edges: independent ``N(other_mu, 1)``.
    """
    if not 0.0 <= rho <= 1.0:
        raise InvalidParams(f"rho must be in [0, 1], got {rho}")
    lat = AgentSpec.make("latent-correlated", mu=0.0, sigma=1.0, rho=rho)
    ind = AgentSpec.make("gaussian", mu=other_mu, sigma=1.0)
    return AgentGraph.build(
        ["s", "a", "b", "t"],
        [("s", "a", lat), ("a", "t", lat), ("s", "b", ind), ("b", "t", ind)],
        "s", "t", InitialSpec.make("gaussian", mu=0.0, sigma=1.0))


# --- benchmark analogs ---------------------------------------------------------

def make_mouse_nav(safe_mu: float = -0.35, risky_mu: float = -0.25, sigma: float = 0.02) -> AgentGraph:
    """One diamond; the bottom path has the bigger obstacles (higher loss)."""
    def rule(idx, diamond, branch, step):
        return AgentSpec.make("gaussian", mu=safe_mu if branch == "a" else risky_mu, sigma=sigma)
    return make_diamond_sequence(1, rule)


ROOMS16_TOP = (-0.30, -0.10, -0.28, -0.12)
ROOMS16_BOTTOM = (-0.12, -0.30, -0.10, -0.27)


def make_rooms16(sigma: float = 0.05) -> AgentGraph:
    """Four diamonds (13 vertices, 16 paths of 8 edges); the best branch alternates."""
    def rule(idx, diamond, branch, step):
        mu = (ROOMS16_TOP if branch == "a" else ROOMS16_BOTTOM)[diamond]
        return AgentSpec.make("gaussian", mu=mu, sigma=sigma)
    return make_diamond_sequence(4, rule)


def make_fetch(num_vertices: int = 7) -> AgentGraph:
    """Shared approach/grip/lift prefix, then two carry trajectories."""
    return make_two_path(
        num_vertices, 5,
        shared=AgentSpec.make("gaussian", mu=0.0, sigma=0.05),
        top=AgentSpec.make("gaussian", mu=0.25, sigma=0.05),
        bottom=AgentSpec.make("gaussian", mu=0.32, sigma=0.05),
    )


def make_box_relay() -> AgentGraph:
    """Relay graph: idle edges have loss -inf, carry edges accumulate box-holding time."""
    idle = AgentSpec.make("constant", value=0.0, loss="neg_inf", output_rule="constant", output_value=0.0)

    def carry(low, high):
        return AgentSpec.make("uniform", low=low, high=high, loss="carry", output_rule="accumulate")

    edges = [
        ("0", "1", idle), ("1", "2", idle), ("1", "6", idle),
        ("2", "3", carry(40, 100)), ("3", "4", idle), ("4", "5", carry(50, 110)),
        ("6", "7", carry(50, 120)), ("7", "8", idle), ("7", "9", idle),
        ("8", "9", carry(20, 60)), ("9", "5", carry(40, 90)),
    ]
    return AgentGraph.build([str(i) for i in range(10)], edges, "0", "5")


@dataclass(frozen=True)
class BenchSpec:
    family: str
    params: dict[str, Any] = field(default_factory=dict)

    def build(self) -> AgentGraph:
        try:
            gen = GENERATORS[self.family]
        except KeyError:
            raise InvalidParams(f"unknown family {self.family!r}; choose from {sorted(GENERATORS)}") from None
        try:
            graph = gen(**self.params)
        except TypeError as exc:
            raise InvalidParams(f"bad parameters for {self.family}: {exc}") from None
        validate(graph)
        return graph


def _agent_from_params(params: dict[str, Any]) -> AgentSpec | None:
    p = dict(params)
    kind = p.pop("kind", None)
    if kind is None:
        if p:
            raise InvalidParams(f"agent parameters {sorted(p)} given without kind=")
        return None
    return AgentSpec.make(kind, **{k: float(v) for k, v in p.items()})


def _gen_chain(m, **agent):
    return make_chain(m, _agent_from_params(agent))


def _gen_diamonds(k, **agent):
    return make_diamond_sequence(k, _agent_from_params(agent))


def _gen_replicated(m=8, k=1, **agent):
    base = make_chain(m, _agent_from_params(agent))
    return replicate_path(base, Path(base.vertices), k)


GENERATORS: dict[str, Callable[..., AgentGraph]] = {
    "chain": _gen_chain,
    "diamond_sequence": _gen_diamonds,
    "two_path": lambda num_vertices=7, path_length=5: make_two_path(num_vertices, path_length),
    "replicated_path": _gen_replicated,
    "correlated_diamond": make_correlated_diamond,
    "mouse_nav": make_mouse_nav,
    "rooms16": make_rooms16,
    "fetch": make_fetch,
    "box_relay": make_box_relay,
}

# (graph factory, bucket count) per benchmark analog
SUITE: dict[str, tuple[Callable[[], AgentGraph], int]] = {
    "MouseNav": (make_mouse_nav, 5),
    "16-Rooms": (make_rooms16, 100),
    "Fetch": (make_fetch, 30),
    "BoxRelay": (make_box_relay, 50),
}
