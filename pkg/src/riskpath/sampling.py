"""Stochastic agents on edges and the deterministic seeding contract.

An agent maps an input value ``x`` to a (trace, output) pair.  Analytic agents
draw a single raw value ``r`` per input from a counter-based stream; the trace
is ``r`` (or the pair ``(x, r)`` for carry losses) and the output follows the
agent's output rule.  Every draw ``i`` of a batch uses counter ``i`` of the
stream, so a batch is a pure function of (inputs, stream).
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Hashable

import numpy as np

from . import kernels
from .errors import DomainMismatch, InvalidParams
from .kernels import codes

KINDS = {
    "constant": codes.CONSTANT,
    "uniform": codes.UNIFORM,
    "gaussian": codes.GAUSSIAN,
    "exponential": codes.EXPONENTIAL,
    "shifted-min-distance": codes.SHIFTED_MIN,
    "latent-correlated": codes.LATENT,
    "empirical": codes.EMPIRICAL,
}
LOSSES = {"identity": codes.LOSS_IDENTITY, "neg_inf": codes.LOSS_NEG_INF, "carry": codes.LOSS_CARRY}
OUTPUT_RULES = {
    "passthrough": codes.OUT_PASSTHROUGH,
    "constant": codes.OUT_CONSTANT,
    "offset": codes.OUT_OFFSET,
    "accumulate": codes.OUT_ACCUMULATE,
}
INITIAL_KINDS = ("constant", "uniform", "gaussian")

# parameter names per kind, in kernel order, with defaults (None = required)
_PARAMS: dict[str, tuple[tuple[str, float | None], ...]] = {
    "constant": (("value", None),),
    "uniform": (("low", 0.0), ("high", 1.0)),
    "gaussian": (("mu", 0.0), ("sigma", 1.0)),
    "exponential": (("rate", 1.0), ("loc", 0.0)),
    "shifted-min-distance": (("shift", 0.0), ("scale", 1.0), ("count", 1.0)),
    "latent-correlated": (("mu", 0.0), ("sigma", 1.0), ("rho", None)),
    "empirical": (),
}

SOURCE_LABEL = "__source__"


def _check_params(kind: str, p: dict[str, float]) -> None:
    if kind == "uniform" and not p["low"] < p["high"]:
        raise InvalidParams(f"uniform needs low < high, got {p['low']}, {p['high']}")
    if kind in ("gaussian", "latent-correlated") and not p["sigma"] > 0:
        raise InvalidParams(f"{kind} needs sigma > 0, got {p['sigma']}")
    if kind == "exponential" and not p["rate"] > 0:
        raise InvalidParams(f"exponential needs rate > 0, got {p['rate']}")
    if kind == "shifted-min-distance" and not (p["scale"] > 0 and p["count"] >= 1):
        raise InvalidParams("shifted-min-distance needs scale > 0 and count >= 1")
    if kind == "latent-correlated" and not 0.0 <= p["rho"] <= 1.0:
        raise InvalidParams(f"latent-correlated needs rho in [0, 1], got {p['rho']}")
    for name, value in p.items():
        if not np.isfinite(value):
            raise InvalidParams(f"{kind}.{name} must be finite")


@dataclass(frozen=True)
class AgentSpec:
    """Serializable description of an edge agent.

    ``params`` holds the kind-specific reals (see ``_PARAMS``); ``loss`` is
    ``identity`` (loss = trace), ``neg_inf`` (loss is always -inf) or
    ``carry`` (loss = input + draw).
    """

    kind: str
    params: tuple[tuple[str, float], ...] = ()
    output_rule: str = "passthrough"
    output_value: float = 0.0
    loss: str = "identity"
    file: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParams(f"unknown agent kind {self.kind!r}")
        if self.output_rule not in OUTPUT_RULES:
            raise InvalidParams(f"unknown output_rule {self.output_rule!r}")
        if self.loss not in LOSSES:
            raise InvalidParams(f"unknown loss {self.loss!r}")
        given = dict(self.params)
        unknown = set(given) - {name for name, _ in _PARAMS[self.kind]}
        if unknown:
            raise InvalidParams(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        full = []
        for name, default in _PARAMS[self.kind]:
            if name in given:
                full.append((name, float(given[name])))
            elif default is None:
                raise InvalidParams(f"{self.kind} requires parameter {name!r}")
            else:
                full.append((name, float(default)))
        object.__setattr__(self, "params", tuple(full))
        _check_params(self.kind, dict(full))
        if self.kind == "empirical":
            if not self.file:
                raise InvalidParams("empirical agent requires 'file'")
            if not os.path.isfile(self.file):
                raise InvalidParams(f"empirical sample file not found: {self.file}")
            _load_table(self.file)

    @classmethod
    def make(cls, kind: str, output_rule: str = "passthrough", output_value: float = 0.0,
             loss: str = "identity", file: str | None = None, **params: float) -> "AgentSpec":
        return cls(kind, tuple(params.items()), output_rule, float(output_value), loss, file)

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        d.update(self.params)
        d["output_rule"] = self.output_rule
        if self.output_rule in ("constant", "offset"):
            d["output_value"] = self.output_value
        if self.loss != "identity":
            d["loss"] = self.loss
        if self.file is not None:
            d["file"] = self.file
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any], base_dir: str | None = None) -> "AgentSpec":
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise InvalidParams("agent spec missing 'kind'") from None
        output_rule = d.pop("output_rule", "passthrough")
        output_value = d.pop("output_value", 0.0)
        loss = d.pop("loss", "identity")
        file = d.pop("file", None)
        if file is not None and base_dir is not None and not os.path.isabs(file):
            file = os.path.join(base_dir, file)
        try:
            params = tuple((k, float(v)) for k, v in d.items())
        except (TypeError, ValueError):
            raise InvalidParams(f"non-numeric parameter in agent spec {d}") from None
        return cls(kind, params, output_rule, float(output_value), loss, file)

    @cached_property
    def model(self) -> "EdgeModel":
        return EdgeModel.from_spec(self)


@dataclass(frozen=True)
class InitialSpec:
    """Distribution of the source input (constant, uniform or gaussian)."""

    kind: str = "constant"
    params: tuple[tuple[str, float], ...] = (("value", 0.0),)

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise InvalidParams(f"initial kind must be one of {INITIAL_KINDS}, got {self.kind!r}")
        # reuse agent validation for parameter names and ranges
        spec = AgentSpec(self.kind, self.params)
        object.__setattr__(self, "params", spec.params)

    @classmethod
    def make(cls, kind: str = "constant", **params: float) -> "InitialSpec":
        if kind == "constant" and not params:
            params = {"value": 0.0}
        return cls(kind, tuple(params.items()))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "InitialSpec":
        d = dict(d)
        kind = d.pop("kind", "constant")
        return cls(kind, tuple((k, float(v)) for k, v in d.items()))

    @cached_property
    def model(self) -> "EdgeModel":
        return EdgeModel.from_spec(AgentSpec(self.kind, self.params))

    def sample(self, n: int, stream: "Stream") -> np.ndarray:
        """Draw ``n`` source inputs."""
        m = self.model
        return kernels.draw_raw(m.kind, m.params, m.table, np.zeros(n), stream.ukey)


@dataclass(frozen=True, eq=False)
class EdgeModel:
    """Compiled agent: kernel codes plus parameter arrays."""

    kind: int
    params: np.ndarray
    table: np.ndarray
    loss_code: int
    out_code: int
    out_value: float

    @classmethod
    def from_spec(cls, spec: AgentSpec) -> "EdgeModel":
        params = np.zeros(4)
        vals = [v for _, v in spec.params]
        params[: len(vals)] = vals
        table = _load_table(spec.file) if spec.kind == "empirical" else np.empty(0)
        return cls(KINDS[spec.kind], params, table, LOSSES[spec.loss],
                   OUTPUT_RULES[spec.output_rule], spec.output_value)

    @property
    def monotone(self) -> bool:
        return codes.is_monotone(self.kind, self.loss_code)


@lru_cache(maxsize=64)
def _load_table(path: str) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)  # empty-file notice; handled below
        try:
            values = np.loadtxt(path, dtype=np.float64, ndmin=1)
        except ValueError as exc:
            raise InvalidParams(f"empirical sample file {path}: {exc}") from None
    if values.size == 0:
        raise InvalidParams(f"empirical sample file is empty: {path}")
    if np.isnan(values).any() or np.isposinf(values).any():
        raise InvalidParams(f"empirical sample file has nan/+inf entries: {path}")
    # sorted so that a draw is monotone in its uniform; the draw distribution
    # (uniform over entries, with replacement) is unchanged
    return np.sort(values)


# --- seeding -----------------------------------------------------------------

def mix64(z: int) -> int:
    z &= codes.MASK64
    z = ((z ^ (z >> 30)) * codes.MIX1) & codes.MASK64
    z = ((z ^ (z >> 27)) * codes.MIX2) & codes.MASK64
    return z ^ (z >> 31)


def _canonical(label: Any) -> Any:
    if isinstance(label, (tuple, list)):
        return [_canonical(x) for x in label]
    if isinstance(label, (np.integer,)):
        return int(label)
    return label


@lru_cache(maxsize=1 << 18)
def label_hash(edge: Hashable, context: Hashable, index: int) -> int:
    text = json.dumps([_canonical(edge), _canonical(context), int(index)], separators=(",", ":"))
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "little")


@dataclass(frozen=True)
class Stream:
    """A counter-based uniform stream: draw ``i`` is ``mix64(key + (i+1)*golden)``."""

    key: int

    @property
    def ukey(self) -> np.uint64:
        return np.uint64(self.key)

    def uniforms(self, count: int, start: int = 0) -> np.ndarray:
        return kernels.uniforms(self.ukey, start, count)


@dataclass(frozen=True)
class SeedDerivation:
    master_seed: int = 0
    _base: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "master_seed", int(self.master_seed) & codes.MASK64)
        object.__setattr__(self, "_base", mix64(self.master_seed + codes.GOLDEN))

    def key(self, edge: Hashable, context: Hashable, index: int = 0) -> int:
        return mix64(label_hash(edge, context, index) ^ self._base)

    def stream(self, edge: Hashable, context: Hashable, index: int = 0) -> Stream:
        return Stream(self.key(edge, context, index))


def derive_rng(seed: SeedDerivation | int, edge: Hashable, context: Hashable, index: int = 0) -> Stream:
    """Stream for the label tuple (edge, context, index) under a master seed."""
    if not isinstance(seed, SeedDerivation):
        seed = SeedDerivation(seed)
    return seed.stream(edge, context, index)


# --- agent operations ----------------------------------------------------------

def _as_inputs(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x)
    if arr.dtype.kind not in "fiub":
        raise DomainMismatch(f"agent inputs must be real numbers, got dtype {arr.dtype}")
    if arr.ndim == 0:
        return arr.astype(np.float64).reshape(1), True
    if arr.ndim != 1:
        raise DomainMismatch(f"agent inputs must be a scalar or 1-d batch, got shape {arr.shape}")
    return np.ascontiguousarray(arr, dtype=np.float64), False


def _model(edge) -> EdgeModel:
    if isinstance(edge, EdgeModel):
        return edge
    if isinstance(edge, AgentSpec):
        return edge.model
    return edge.agent.model  # graph Edge


def sample_edge(edge, inputs, stream: Stream):
    """Draw one (trace, output) pair per input.

    ``edge`` may be an :class:`EdgeModel`, an :class:`AgentSpec` or a graph
    edge.  Traces are the raw draws, except for carry losses where each trace
    is the pair ``(previous carry, steps)``.  Scalar input gives scalar results.
    """
    m = _model(edge)
    x, scalar = _as_inputs(inputs)
    raw = kernels.draw_raw(m.kind, m.params, m.table, x, stream.ukey)
    outputs = kernels.apply_output(m.out_code, m.out_value, x, raw)
    traces = np.column_stack([x, raw]) if m.loss_code == codes.LOSS_CARRY else raw
    if scalar:
        return traces[0], outputs[0]
    return traces, outputs


def loss_of(edge, traces):
    """Loss of each trace: finite real or -inf."""
    m = _model(edge)
    t = np.asarray(traces, dtype=np.float64)
    if m.loss_code == codes.LOSS_NEG_INF:
        out = np.full(t.shape, -np.inf)
    elif m.loss_code == codes.LOSS_CARRY:
        out = t[..., 0] + t[..., 1]
    else:
        out = t.copy()
    return float(out) if out.ndim == 0 else out


def edge_outputs(edge, inputs, stream: Stream) -> np.ndarray:
    """Outputs only; cheaper than :func:`sample_edge` for passthrough agents."""
    m = _model(edge)
    x, _ = _as_inputs(inputs)
    if m.out_code == codes.OUT_PASSTHROUGH:
        return x
    if m.out_code == codes.OUT_CONSTANT:
        return np.full(x.shape, m.out_value)
    if m.out_code == codes.OUT_OFFSET:
        return x + m.out_value
    raw = kernels.draw_raw(m.kind, m.params, m.table, x, stream.ukey)
    return kernels.apply_output(m.out_code, m.out_value, x, raw)


def edge_losses(edge, inputs, stream: Stream) -> np.ndarray:
    m = _model(edge)
    x, _ = _as_inputs(inputs)
    if m.loss_code == codes.LOSS_NEG_INF:
        return np.full(x.shape, -np.inf)
    raw = kernels.draw_raw(m.kind, m.params, m.table, x, stream.ukey)
    return kernels.losses_from_raw(m.loss_code, raw, x)
