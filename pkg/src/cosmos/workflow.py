"""Workflow DAG, per-function workload quantities, and latency lookup.

A workflow document carries the function profiles (all quantities as decimal
strings), the precedence edges, and an optional latency block that maps each
(function, platform) pair to a mean end-to-end latency in milliseconds. The
latency block may give explicit entries, or derive a platform's latencies by
multiplying a reference platform's entries by a factor; explicit entries win.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import IO, Iterable, Mapping

from .errors import (
    CycleError,
    MissingLatencyError,
    SchemaError,
    UnknownFunctionError,
    UnplacedFunctionError,
)
from .money import CONTEXT, dec

ZERO = Decimal(0)


@dataclass(frozen=True)
class BaasUsage:
    """One backing-service consumption entry of a function.

    ``quantity`` is months of availability for fixed-priced components, GB
    processed per request for per-GB components, and 1 for plain per-request
    pricing. ``platforms`` optionally restricts the entry to the named
    platforms (services consumed on one provider only).
    """

    component_id: str
    quantity: Decimal
    platforms: frozenset[str] | None = None

    def applies_to(self, platform_id: str) -> bool:
        return self.platforms is None or platform_id in self.platforms


@dataclass(frozen=True)
class FunctionProfile:
    """Workload quantities of one serverless function.

    ``t`` is the billed compute time per request in seconds; platform-specific
    measurements go in ``t_overrides`` (the same code runs faster or slower on
    different hardware). ``d`` is state retained per billing month regardless
    of traffic; ``d_per_request`` adds state that accrues with request volume.
    """

    function_id: str
    n: Decimal = ZERO
    t: Decimal = ZERO
    mem: Decimal = ZERO
    d: Decimal = ZERO
    d_per_request: Decimal = ZERO
    r_in: Decimal = ZERO
    r_out: Decimal = ZERO
    baas_usage: tuple[BaasUsage, ...] = ()
    workload_class: str | None = None
    t_overrides: Mapping[str, Decimal] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("n", "t", "mem", "d", "d_per_request", "r_in", "r_out"):
            if getattr(self, name) < 0:
                raise SchemaError(f"function {self.function_id!r}: {name} must be >= 0")
        for usage in self.baas_usage:
            if usage.quantity < 0:
                raise SchemaError(
                    f"function {self.function_id!r}: negative quantity for "
                    f"component {usage.component_id!r}"
                )
        for platform, t in self.t_overrides.items():
            if t < 0:
                raise SchemaError(
                    f"function {self.function_id!r}: negative compute time for {platform!r}"
                )

    def compute_time_on(self, platform_id: str) -> Decimal:
        return self.t_overrides.get(platform_id, self.t)

    def stored_gb(self, n: Decimal) -> Decimal:
        return self.d + CONTEXT.multiply(self.d_per_request, n)


@dataclass(frozen=True)
class WorkflowSpec:
    """A validated workflow: unique functions and an acyclic edge relation."""

    workflow_id: str
    functions: tuple[FunctionProfile, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        ids = [f.function_id for f in self.functions]
        if len(set(ids)) != len(ids):
            raise SchemaError(f"workflow {self.workflow_id!r}: duplicate function ids")
        known = set(ids)
        for src, dst in self.edges:
            for endpoint in (src, dst):
                if endpoint not in known:
                    raise UnknownFunctionError(
                        f"edge ({src!r}, {dst!r}) references unknown function {endpoint!r}"
                    )
        self._check_acyclic()

    def _check_acyclic(self):
        succs: dict[str, list[str]] = {f.function_id: [] for f in self.functions}
        indeg = {f.function_id: 0 for f in self.functions}
        for src, dst in self.edges:
            succs[src].append(dst)
            indeg[dst] += 1
        ready = [fid for fid, d in indeg.items() if d == 0]
        seen = 0
        while ready:
            fid = ready.pop()
            seen += 1
            for nxt in succs[fid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if seen != len(self.functions):
            raise CycleError(f"workflow {self.workflow_id!r}: edge relation contains a cycle")

    @property
    def function_ids(self) -> tuple[str, ...]:
        return tuple(f.function_id for f in self.functions)

    def function(self, function_id: str) -> FunctionProfile:
        for f in self.functions:
            if f.function_id == function_id:
                return f
        raise UnknownFunctionError(f"unknown function {function_id!r}")

    def topological_order(self) -> list[str]:
        succs: dict[str, list[str]] = {f.function_id: [] for f in self.functions}
        indeg = {f.function_id: 0 for f in self.functions}
        for src, dst in self.edges:
            succs[src].append(dst)
            indeg[dst] += 1
        # Deterministic: ties resolve in declaration order.
        order: list[str] = []
        ready = [fid for fid in self.function_ids if indeg[fid] == 0]
        while ready:
            fid = ready.pop(0)
            order.append(fid)
            for nxt in succs[fid]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        return order

    def predecessors(self) -> dict[str, list[str]]:
        preds: dict[str, list[str]] = {f.function_id: [] for f in self.functions}
        for src, dst in self.edges:
            preds[dst].append(src)
        return preds


@dataclass(frozen=True)
class Placement:
    """Total assignment of workflow functions to platforms."""

    assignments: tuple[tuple[str, str], ...]

    @classmethod
    def uniform(cls, workflow: WorkflowSpec, platform_id: str) -> "Placement":
        return cls(tuple((fid, platform_id) for fid in workflow.function_ids))

    @classmethod
    def of(cls, mapping: Mapping[str, str] | Iterable[tuple[str, str]]) -> "Placement":
        pairs = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(pairs))

    def platform_for(self, function_id: str) -> str:
        for fid, pid in self.assignments:
            if fid == function_id:
                return pid
        raise UnplacedFunctionError(f"placement does not assign function {function_id!r}")

    def platforms(self) -> tuple[str, ...]:
        return tuple(pid for _, pid in self.assignments)

    def as_dict(self) -> dict[str, str]:
        return dict(self.assignments)

    def __str__(self) -> str:
        return ",".join(f"{fid}={pid}" for fid, pid in self.assignments)


@dataclass(frozen=True)
class LatencyTable:
    """Mean end-to-end latency (ms) per (function, platform) pair."""

    entries: Mapping[tuple[str, str], Decimal]

    def get(self, function_id: str, platform_id: str) -> Decimal:
        try:
            return self.entries[(function_id, platform_id)]
        except KeyError:
            raise MissingLatencyError(function_id, platform_id) from None

    def has(self, function_id: str, platform_id: str) -> bool:
        return (function_id, platform_id) in self.entries

    def platforms(self) -> tuple[str, ...]:
        return tuple(sorted({pid for _, pid in self.entries}))


def workflow_latency(
    workflow: WorkflowSpec, placement: Placement, latencies: LatencyTable
) -> Decimal:
    """End-to-end latency of a placement: the DAG critical path.

    Node weight is the function's latency on its assigned platform. On a
    chain this equals the plain sum of per-function latencies.
    """
    weights = {
        fid: latencies.get(fid, placement.platform_for(fid)) for fid in workflow.function_ids
    }
    preds = workflow.predecessors()
    dist: dict[str, Decimal] = {}
    for fid in workflow.topological_order():
        upstream = max((dist[p] for p in preds[fid]), default=ZERO)
        dist[fid] = upstream + weights[fid]
    return max(dist.values(), default=ZERO)


# --- document loading -------------------------------------------------------

_FN_KEYS = {
    "function_id", "n", "t", "mem", "d", "d_per_request", "r_in", "r_out",
    "baas_usage", "workload_class", "t_overrides",
}
_WF_KEYS = {"workflow_id", "functions", "edges", "latency"}
_USAGE_KEYS = {"component_id", "quantity", "platforms"}
_LATENCY_KEYS = {"reference_platform", "entries", "factors"}


def _parse_quantity(obj: Mapping, key: str, owner: str, default: str = "0") -> Decimal:
    raw = obj.get(key, default)
    if isinstance(raw, float):
        raise SchemaError(f"{owner}: {key} must be a decimal string, not a float")
    if isinstance(raw, (str, int)):
        return dec(raw)
    raise SchemaError(f"{owner}: {key} must be a decimal string")


def _parse_usage(obj: Mapping, owner: str) -> BaasUsage:
    if not isinstance(obj, Mapping):
        raise SchemaError(f"{owner}: baas_usage entries must be objects")
    unknown = set(obj) - _USAGE_KEYS
    if unknown:
        raise SchemaError(f"{owner}: unknown baas_usage field(s): {sorted(unknown)}")
    if "component_id" not in obj:
        raise SchemaError(f"{owner}: baas_usage entry missing component_id")
    platforms = obj.get("platforms")
    return BaasUsage(
        component_id=str(obj["component_id"]),
        quantity=_parse_quantity(obj, "quantity", owner, default="1"),
        platforms=frozenset(platforms) if platforms is not None else None,
    )


def _parse_function(obj: Mapping) -> FunctionProfile:
    if not isinstance(obj, Mapping):
        raise SchemaError("functions array entries must be objects")
    unknown = set(obj) - _FN_KEYS
    if unknown:
        raise SchemaError(f"unknown function field(s): {sorted(unknown)}")
    if "function_id" not in obj:
        raise SchemaError("function entry missing function_id")
    fid = str(obj["function_id"])
    overrides = {
        str(platform): _parse_quantity({"t": raw}, "t", fid)
        for platform, raw in (obj.get("t_overrides") or {}).items()
    }
    return FunctionProfile(
        function_id=fid,
        n=_parse_quantity(obj, "n", fid),
        t=_parse_quantity(obj, "t", fid),
        mem=_parse_quantity(obj, "mem", fid),
        d=_parse_quantity(obj, "d", fid),
        d_per_request=_parse_quantity(obj, "d_per_request", fid),
        r_in=_parse_quantity(obj, "r_in", fid),
        r_out=_parse_quantity(obj, "r_out", fid),
        baas_usage=tuple(_parse_usage(u, fid) for u in obj.get("baas_usage", [])),
        workload_class=obj.get("workload_class"),
        t_overrides=overrides,
    )


def _parse_latency_block(block: Mapping, functions: tuple[FunctionProfile, ...]) -> LatencyTable:
    unknown = set(block) - _LATENCY_KEYS
    if unknown:
        raise SchemaError(f"unknown latency field(s): {sorted(unknown)}")
    entries: dict[tuple[str, str], Decimal] = {}
    for fid, per_platform in (block.get("entries") or {}).items():
        if not isinstance(per_platform, Mapping):
            raise SchemaError(f"latency entries for {fid!r} must map platform to ms")
        for pid, raw in per_platform.items():
            entries[(str(fid), str(pid))] = _parse_quantity({"ms": raw}, "ms", f"latency {fid}")
    reference = block.get("reference_platform")
    factors = block.get("factors") or {}
    if factors and reference is None:
        raise SchemaError("latency factors require a reference_platform")
    for pid, raw in factors.items():
        factor = _parse_quantity({"factor": raw}, "factor", f"latency factor {pid}")
        for f in functions:
            key = (f.function_id, str(pid))
            ref_key = (f.function_id, str(reference))
            if key not in entries and ref_key in entries:
                entries[key] = CONTEXT.multiply(entries[ref_key], factor)
    return LatencyTable(entries=entries)


def load_workflow_document(source: str | Path | IO[str] | Mapping) -> tuple[WorkflowSpec, LatencyTable | None]:
    """Load a workflow document; returns the workflow and its latency table, if any."""
    doc = _read_json(source)
    if not isinstance(doc, Mapping):
        raise SchemaError("workflow document must be a JSON object")
    unknown = set(doc) - _WF_KEYS
    if unknown:
        raise SchemaError(f"unknown workflow field(s): {sorted(unknown)}")
    for key in ("workflow_id", "functions"):
        if key not in doc:
            raise SchemaError(f"workflow missing required field {key!r}")
    functions = tuple(_parse_function(f) for f in doc["functions"])
    edges = []
    for edge in doc.get("edges", []):
        if not isinstance(edge, (list, tuple)) or len(edge) != 2:
            raise SchemaError(f"edges must be [from, to] pairs, got {edge!r}")
        edges.append((str(edge[0]), str(edge[1])))
    workflow = WorkflowSpec(
        workflow_id=str(doc["workflow_id"]), functions=functions, edges=tuple(edges)
    )
    latency = None
    if "latency" in doc and doc["latency"] is not None:
        latency = _parse_latency_block(doc["latency"], functions)
    return workflow, latency


def load_workflow(source: str | Path | IO[str] | Mapping) -> WorkflowSpec:
    """Load and validate a workflow document, rejecting cycles and dangling edges."""
    workflow, _ = load_workflow_document(source)
    return workflow


def _read_json(source):
    if isinstance(source, Mapping):
        return source
    if hasattr(source, "read"):
        return json.load(source)
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)


def bundled_fixture_dir() -> Path:
    return Path(__file__).parent / "fixtures"
