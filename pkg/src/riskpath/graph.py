"""Agent-graph data model and structural algorithms."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

from .errors import (
    CycleDetected,
    DeadEndVertex,
    InvalidGraph,
    MissingSourceOrTerminal,
    NotAPath,
    PathBudgetExceeded,
    UnreachableVertex,
)
from .sampling import AgentSpec, InitialSpec

DEFAULT_PATH_CAP = 10**6


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    agent: AgentSpec

    @property
    def id(self) -> str:
        return f"{self.src}->{self.dst}"

    @property
    def pair(self) -> tuple[str, str]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class AgentGraph:
    """DAG whose edges carry stochastic agents.

    Construction does not validate; call :func:`validate` before running any
    algorithm on a graph built from untrusted input.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    source: str
    terminal: str
    initial: InitialSpec = field(default_factory=InitialSpec)

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str, AgentSpec]],
              source: str, terminal: str, initial: InitialSpec | None = None) -> "AgentGraph":
        return cls(tuple(str(v) for v in vertices),
                   tuple(Edge(str(u), str(v), a) for u, v, a in edges),
                   str(source), str(terminal), initial or InitialSpec())

    @cached_property
    def _succ(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out.setdefault(e.src, []).append(e.dst)
        return {v: sorted(ws) for v, ws in out.items()}

    @cached_property
    def _pred(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out.setdefault(e.dst, []).append(e.src)
        return {v: sorted(us) for v, us in out.items()}

    @cached_property
    def _edge_map(self) -> dict[tuple[str, str], Edge]:
        return {e.pair: e for e in self.edges}

    def successors(self, v: str) -> list[str]:
        return self._succ.get(v, [])

    def predecessors(self, v: str) -> list[str]:
        return self._pred.get(v, [])

    def edge(self, u: str, v: str) -> Edge:
        try:
            return self._edge_map[(u, v)]
        except KeyError:
            raise InvalidGraph(f"no edge {u}->{v}") from None

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertices": list(self.vertices),
            "source": self.source,
            "terminal": self.terminal,
            "edges": [{"from": e.src, "to": e.dst, "agent": e.agent.to_dict()} for e in self.edges],
            "initial": self.initial.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any], base_dir: str | None = None) -> "AgentGraph":
        try:
            vertices = [str(v) for v in doc["vertices"]]
            edges = [(str(e["from"]), str(e["to"]), AgentSpec.from_dict(e["agent"], base_dir))
                     for e in doc["edges"]]
            source = doc.get("source")
            terminal = doc.get("terminal")
        except (KeyError, TypeError) as exc:
            raise InvalidGraph(f"malformed graph document: missing {exc}") from None
        if source is None or terminal is None:
            raise MissingSourceOrTerminal("graph document needs 'source' and 'terminal'")
        initial = InitialSpec.from_dict(doc["initial"]) if "initial" in doc else InitialSpec()
        return cls.build(vertices, edges, source, terminal, initial)


@dataclass(frozen=True)
class Path:
    vertices: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.vertices[:-1], self.vertices[1:]))

    def __len__(self) -> int:
        """Number of edges."""
        return max(len(self.vertices) - 1, 0)

    def __str__(self) -> str:
        return " -> ".join(self.vertices)


def validate(graph: AgentGraph) -> None:
    """Raise the first violated structural invariant, in this order:
    missing source/terminal, malformed edges, cycle, unreachable vertex, dead end.
    """
    vset = set(graph.vertices)
    if len(vset) != len(graph.vertices):
        raise InvalidGraph("duplicate vertex ids")
    if graph.source not in vset or graph.terminal not in vset:
        raise MissingSourceOrTerminal(
            f"source {graph.source!r} and terminal {graph.terminal!r} must be listed vertices")
    if graph.source == graph.terminal:
        raise MissingSourceOrTerminal("source and terminal must differ")
    seen = set()
    for e in graph.edges:
        if e.src not in vset or e.dst not in vset:
            raise InvalidGraph(f"edge {e.id} references an unknown vertex")
        if e.src == e.dst:
            raise CycleDetected([e.pair])
        if e.pair in seen:
            raise InvalidGraph(f"duplicate edge {e.id}")
        seen.add(e.pair)

    cycle = _find_cycle(graph)
    if cycle:
        raise CycleDetected(cycle)

    fwd = _reach(graph.source, graph.successors)
    for v in sorted(vset):
        if v not in fwd:
            raise UnreachableVertex(v)
    back = _reach(graph.terminal, graph.predecessors)
    for v in sorted(vset):
        if v not in back:
            raise DeadEndVertex(v)


def _reach(start: str, nbrs) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for w in nbrs(stack.pop()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _find_cycle(graph: AgentGraph) -> list[tuple[str, str]] | None:
    color = {v: 0 for v in graph.vertices}
    parent: dict[str, str] = {}
    for root in sorted(graph.vertices):
        if color[root]:
            continue
        stack = [(root, iter(graph.successors(root)))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif color[w] == 0:
                color[w] = 1
                parent[w] = v
                stack.append((w, iter(graph.successors(w))))
            elif color[w] == 1:
                cyc = [(v, w)]
                x = v
                while x != w:
                    cyc.append((parent[x], x))
                    x = parent[x]
                return cyc[::-1]
    return None


def topological_order(graph: AgentGraph) -> list[str]:
    """Kahn's order over all vertices except the source; ties by vertex id."""
    indeg = {v: len(graph.predecessors(v)) for v in graph.vertices}
    heap = [v for v, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in graph.successors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    if len(order) != len(graph.vertices):
        raise CycleDetected(_find_cycle(graph) or [])
    return [v for v in order if v != graph.source]


def count_paths(graph: AgentGraph) -> int:
    counts = {graph.source: 1}
    for v in topological_order(graph):
        counts[v] = sum(counts.get(u, 0) for u in graph.predecessors(v))
    return counts.get(graph.terminal, 0)


def enumerate_paths(graph: AgentGraph, cap: int = DEFAULT_PATH_CAP) -> list[Path]:
    """All source-terminal paths in lexicographic vertex-id order."""
    total = count_paths(graph)
    if total > cap:
        raise PathBudgetExceeded(total, cap)
    paths: list[Path] = []
    prefix = [graph.source]

    def walk(v: str) -> None:
        if v == graph.terminal:
            paths.append(Path(tuple(prefix)))
            return
        for w in graph.successors(v):
            prefix.append(w)
            walk(w)
            prefix.pop()

    walk(graph.source)
    return paths


def path_edges(graph: AgentGraph, path: Path | Sequence[str]) -> list[Edge]:
    """Edges along ``path``; raises if consecutive vertices are not adjacent."""
    verts = path.vertices if isinstance(path, Path) else tuple(path)
    return [graph.edge(u, v) for u, v in zip(verts[:-1], verts[1:])]


def check_full_path(graph: AgentGraph, path: Path) -> None:
    if len(path) == 0:
        raise NotAPath("path has no edges")
    if path.vertices[0] != graph.source or path.vertices[-1] != graph.terminal:
        raise NotAPath(f"path {path} does not run from {graph.source} to {graph.terminal}")
    if len(set(path.vertices)) != len(path.vertices):
        raise NotAPath(f"path {path} repeats a vertex")
    path_edges(graph, path)
