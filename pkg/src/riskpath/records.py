"""On-disk formats: graph files, result/report files and sweep CSVs.

Result and report files are two JSON lines.  The first is a header holding
the wall-clock fields (timestamp, seconds) and the second the deterministic
body, so reruns with the same seed produce an identical second line.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import os
from typing import Any, Iterable, Sequence

from .errors import GraphMismatch, InvalidGraph
from .graph import AgentGraph

FORMAT = "riskpath/1"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def graph_sha256(graph: AgentGraph) -> str:
    return hashlib.sha256(canonical_json(graph.to_dict()).encode()).hexdigest()


def save_graph(graph: AgentGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(graph.to_dict(), fh, indent=2)
        fh.write("\n")


def load_graph(path: str) -> AgentGraph:
    """Parse a graph file; relative empirical sample paths resolve next to it."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidGraph(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise InvalidGraph(f"{path}: graph document must be a JSON object")
    return AgentGraph.from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


def write_record(path: str, kind: str, body: dict[str, Any], seconds: float | None = None) -> None:
    header = {"format": FORMAT, "kind": kind,
              "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")}
    if seconds is not None:
        header["wall_seconds"] = seconds
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        fh.write(canonical_json(body) + "\n")


def read_record(path: str, kind: str | None = None) -> tuple[dict[str, Any], dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError(f"{path}: expected a header line and a body line")
    header, body = json.loads(lines[0]), json.loads(lines[1])
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: unknown record format {header.get('format')!r}")
    if kind is not None and header.get("kind") != kind:
        raise ValueError(f"{path}: expected a {kind} record, found {header.get('kind')!r}")
    return header, body


def check_graph_hash(body: dict[str, Any], graph: AgentGraph) -> None:
    want = body.get("graph_sha256")
    got = graph_sha256(graph)
    if want != got:
        raise GraphMismatch(f"result was computed on graph {want}, not on this graph ({got})")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])
