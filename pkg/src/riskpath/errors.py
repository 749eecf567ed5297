"""Exception types raised across the package."""

from __future__ import annotations


class RiskPathError(Exception):
    """Base class for all package errors."""


class InvalidParams(RiskPathError, ValueError):
    pass


class InvalidConfig(InvalidParams):
    pass


class GraphValidationError(RiskPathError):
    """Raised by :func:`riskpath.graph.validate` for the first violated invariant."""


class MissingSourceOrTerminal(GraphValidationError):
    pass


class InvalidGraph(GraphValidationError):
    """Malformed graph document (unknown vertex, duplicate edge, ...)."""


class CycleDetected(GraphValidationError):
    def __init__(self, edges):
        self.edges = list(edges)
        super().__init__("cycle detected through edges: " + ", ".join(f"{u}->{v}" for u, v in self.edges))


class UnreachableVertex(GraphValidationError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex!r} is not reachable from the source")


class DeadEndVertex(GraphValidationError):
    def __init__(self, vertex):
        self.vertex = vertex
        super().__init__(f"vertex {vertex!r} cannot reach the terminal")


class PathBudgetExceeded(RiskPathError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"graph has {count} source-terminal paths, cap is {cap}")


class EmptySamples(RiskPathError, ValueError):
    pass


class DomainMismatch(RiskPathError, ValueError):
    pass


class UnsupportedEdgeKind(RiskPathError):
    pass


class NotAPath(RiskPathError, ValueError):
    pass


class GraphMismatch(RiskPathError):
    pass
