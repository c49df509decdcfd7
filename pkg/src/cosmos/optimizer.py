"""Placement search: anchors, auto-derived weights, and constrained optimization.

The search is exhaustive over all |platforms|^|functions| assignments (capped),
which keeps results exact and reproducible at the instance sizes this tool
targets. Weights default to the reciprocals of the two unconstrained anchors:
alpha = 1/C* (cheapest achievable cost) and beta = 1/T* (fastest achievable
latency), so cost and latency enter the objective equally normalized.
"""

from __future__ import annotations

import itertools
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .catalog import PlatformCatalog
from .engine import function_cost, workflow_cost
from .errors import (
    CapExceededError,
    DegenerateAnchorError,
    DomainError,
    InfeasibleError,
    MissingLatencyError,
    SchemaError,
)
from .money import CONTEXT, dec, div
from .workflow import LatencyTable, Placement, WorkflowSpec, workflow_latency

ZERO = Decimal(0)

DEFAULT_ENUMERATION_CAP = 10**7

#: Objectives closer than this are treated as tied and broken deterministically.
OBJECTIVE_TOLERANCE = Decimal("1e-9")


@dataclass(frozen=True)
class ParetoPoint:
    """A labeled (cost, latency) alternative, optionally tied to a placement."""

    label: str
    cost: Decimal
    latency: Decimal
    placement: Placement | None = None

    def __post_init__(self):
        if self.cost < 0 or self.latency < 0:
            raise DomainError(f"point {self.label!r} has negative cost or latency")


def pareto_front(points: Iterable[ParetoPoint]) -> list[ParetoPoint]:
    """Points not weakly dominated by any other point, latency ascending.

    Duplicate (cost, latency) pairs collapse to the first by input order.
    """
    unique: list[ParetoPoint] = []
    seen: set[tuple[Decimal, Decimal]] = set()
    for p in points:
        key = (p.cost, p.latency)
        if key in seen:
            continue
        seen.add(key)
        unique.append(p)
    # Latency-ascending sweep: a point survives iff its cost beats everything
    # at equal-or-lower latency. Within one latency the cheapest point
    # dominates the rest, so only the group's first candidate can survive.
    front: list[ParetoPoint] = []
    best_cost: Decimal | None = None
    last_latency: Decimal | None = None
    for p in sorted(unique, key=lambda p: (p.latency, p.cost)):
        if p.latency == last_latency:
            continue
        last_latency = p.latency
        if best_cost is None or p.cost < best_cost:
            front.append(p)
            best_cost = p.cost
    return front


def optimal_line(points: Iterable[ParetoPoint]) -> list[ParetoPoint]:
    """The efficient trade-off line: the lower convex frontier of the points.

    Stricter than pareto_front: a point additionally drops out when a convex
    mix of two other alternatives beats it on both axes (the line one would
    draw under the cloud of points). Always a subset of the front.
    """
    front = pareto_front(points)
    hull: list[ParetoPoint] = []
    for p in front:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) < 0:
            hull.pop()
        hull.append(p)
    return hull


def _cross(o: ParetoPoint, a: ParetoPoint, b: ParetoPoint) -> Decimal:
    return (a.latency - o.latency) * (b.cost - o.cost) - (a.cost - o.cost) * (
        b.latency - o.latency
    )


# --- placement evaluation models -------------------------------------------


class PlacementModel(ABC):
    """Maps placements to (cost, latency); backed by catalogs or measured points."""

    def __init__(self, workflow: WorkflowSpec):
        self.workflow = workflow

    @abstractmethod
    def function_cost_of(self, function_id: str, platform_id: str) -> Decimal: ...

    @abstractmethod
    def function_latency_of(self, function_id: str, platform_id: str) -> Decimal: ...

    def cost_of(self, placement: Placement) -> Decimal:
        total = ZERO
        for fid in self.workflow.function_ids:
            total += self.function_cost_of(fid, placement.platform_for(fid))
        return total

    def latency_of(self, placement: Placement) -> Decimal:
        entries = {
            (fid, placement.platform_for(fid)): self.function_latency_of(
                fid, placement.platform_for(fid)
            )
            for fid in self.workflow.function_ids
        }
        return workflow_latency(self.workflow, placement, LatencyTable(entries))

    def points(self, platforms: Sequence[str]) -> list[ParetoPoint]:
        """Per-(function, platform) alternatives, for front extraction."""
        return [
            ParetoPoint(
                label=f"{fid}@{pid}",
                cost=self.function_cost_of(fid, pid),
                latency=self.function_latency_of(fid, pid),
            )
            for fid in self.workflow.function_ids
            for pid in platforms
        ]


class CatalogModel(PlacementModel):
    """Costs from rate cards; latencies from a measured latency table."""

    def __init__(
        self,
        workflow: WorkflowSpec,
        catalogs: Mapping[str, PlatformCatalog],
        latencies: LatencyTable | None = None,
        volume: Decimal | int | str | None = None,
    ):
        super().__init__(workflow)
        self.catalogs = catalogs
        self.latencies = latencies
        self.volume = None if volume is None else dec(volume)
        self._fn_cache: dict[tuple[str, str], Decimal] = {}
        self._wf_cache: dict[Placement, Decimal] = {}

    def function_cost_of(self, function_id: str, platform_id: str) -> Decimal:
        key = (function_id, platform_id)
        if key not in self._fn_cache:
            profile = self.workflow.function(function_id)
            catalog = self.catalogs[platform_id]
            latency_ms = None
            if catalog.per_ms_priced:
                latency_ms = self.function_latency_of(function_id, platform_id)
            self._fn_cache[key] = function_cost(
                profile, catalog, latency_ms=latency_ms, volume=self.volume
            ).total
        return self._fn_cache[key]

    def function_latency_of(self, function_id: str, platform_id: str) -> Decimal:
        if self.latencies is None:
            raise MissingLatencyError(function_id, platform_id)
        return self.latencies.get(function_id, platform_id)

    def cost_of(self, placement: Placement) -> Decimal:
        if placement not in self._wf_cache:
            self._wf_cache[placement] = workflow_cost(
                self.workflow,
                placement,
                self.catalogs,
                latencies=self.latencies,
                volume=self.volume,
            ).total
        return self._wf_cache[placement]


class PointTableModel(PlacementModel):
    """Direct per-(function, platform) cost and latency measurements."""

    def __init__(
        self, workflow: WorkflowSpec, table: Mapping[tuple[str, str], tuple[Decimal, Decimal]]
    ):
        super().__init__(workflow)
        self.table = dict(table)

    def function_cost_of(self, function_id: str, platform_id: str) -> Decimal:
        try:
            return self.table[(function_id, platform_id)][0]
        except KeyError:
            raise MissingLatencyError(function_id, platform_id) from None

    def function_latency_of(self, function_id: str, platform_id: str) -> Decimal:
        try:
            return self.table[(function_id, platform_id)][1]
        except KeyError:
            raise MissingLatencyError(function_id, platform_id) from None


def load_point_table(
    source: str | Path | IO[str] | Mapping,
) -> dict[tuple[str, str], tuple[Decimal, Decimal]]:
    """Read a (function, platform) -> (cost, latency_ms) table document."""
    if isinstance(source, Mapping):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if not isinstance(doc, Mapping) or "points" not in doc:
        raise SchemaError("point table document must be an object with a points array")
    table: dict[tuple[str, str], tuple[Decimal, Decimal]] = {}
    for entry in doc["points"]:
        for key in ("function_id", "platform_id", "cost", "latency_ms"):
            if key not in entry:
                raise SchemaError(f"point entry missing required field {key!r}")
        cost, latency = dec(entry["cost"]), dec(entry["latency_ms"])
        if cost < 0 or latency < 0:
            raise SchemaError(
                f"point ({entry['function_id']}, {entry['platform_id']}) must be nonnegative"
            )
        table[(str(entry["function_id"]), str(entry["platform_id"]))] = (cost, latency)
    return table


# --- enumeration and anchor solves ------------------------------------------


def enumerate_placements(
    workflow: WorkflowSpec,
    platforms: Sequence[str],
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Placement]:
    """Every total assignment exactly once, in deterministic lexicographic order.

    Order is by (function declaration order, platform argument order); the
    last function's platform varies fastest. Raises CapExceededError up front
    when the full count would exceed the cap.
    """
    platforms = list(platforms)
    if not platforms:
        raise DomainError("at least one platform is required")
    total = len(platforms) ** len(workflow.functions)
    if total > cap:
        raise CapExceededError(total, cap)
    fids = workflow.function_ids

    def generate() -> Iterator[Placement]:
        for combo in itertools.product(platforms, repeat=len(fids)):
            yield Placement(tuple(zip(fids, combo)))

    return generate()


def min_cost(
    workflow: WorkflowSpec,
    platforms: Sequence[str],
    model: PlacementModel,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[Decimal, Placement]:
    """C*: cheapest achievable workflow cost, ignoring latency entirely."""
    best: tuple[Decimal, Placement] | None = None
    for placement in enumerate_placements(workflow, platforms, cap):
        cost = model.cost_of(placement)
        if best is None or cost < best[0]:
            best = (cost, placement)
    assert best is not None
    return best


def min_time(
    workflow: WorkflowSpec,
    platforms: Sequence[str],
    model: PlacementModel,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[Decimal, Placement]:
    """T*: fastest achievable workflow latency, ignoring cost entirely."""
    best: tuple[Decimal, Placement] | None = None
    for placement in enumerate_placements(workflow, platforms, cap):
        latency = model.latency_of(placement)
        if best is None or latency < best[0]:
            best = (latency, placement)
    assert best is not None
    return best


def auto_weights(c_star: Decimal, t_star: Decimal) -> tuple[Decimal, Decimal]:
    """alpha = 1/C*, beta = 1/T*; undefined when an anchor is zero."""
    if c_star == 0 or t_star == 0:
        raise DegenerateAnchorError(
            f"anchors must be positive to derive weights (C*={c_star}, T*={t_star})"
        )
    return div(Decimal(1), c_star), div(Decimal(1), t_star)


# --- constrained weighted optimization ---------------------------------------

WEIGHT_MODES = ("auto_pareto", "manual")
SCOPES = ("workflow", "per_function")


@dataclass(frozen=True)
class OptimizationConfig:
    """Budget/latency constraints plus weighting and constraint scope."""

    budget: Decimal | None = None
    latency_slo: Decimal | None = None
    weight_mode: str = "auto_pareto"
    alpha: Decimal | None = None
    beta: Decimal | None = None
    scope: str = "workflow"

    def __post_init__(self):
        if self.budget is not None and self.budget <= 0:
            raise DomainError("budget must be > 0")
        if self.latency_slo is not None and self.latency_slo <= 0:
            raise DomainError("latency_slo must be > 0")
        if self.weight_mode not in WEIGHT_MODES:
            raise DomainError(f"weight_mode must be one of {WEIGHT_MODES}")
        if self.scope not in SCOPES:
            raise DomainError(f"scope must be one of {SCOPES}")
        if self.weight_mode == "manual":
            if self.alpha is None or self.beta is None:
                raise DomainError("manual weighting requires alpha and beta")
            if self.alpha < 0 or self.beta < 0:
                raise DomainError("manual weights must be >= 0")
            if self.alpha == 0 and self.beta == 0:
                raise DomainError("manual weights must not both be zero")


@dataclass(frozen=True)
class OptimizationResult:
    best: Placement
    cost: Decimal
    latency: Decimal
    objective: float
    alpha: float
    beta: float
    c_star: Decimal
    t_star: Decimal
    c_star_placement: Placement
    t_star_placement: Placement
    feasible_count: int
    total_count: int


def _is_feasible(
    model: PlacementModel,
    placement: Placement,
    cost: Decimal,
    latency: Decimal,
    config: OptimizationConfig,
) -> bool:
    if config.scope == "workflow":
        if config.budget is not None and cost > config.budget:
            return False
        if config.latency_slo is not None and latency > config.latency_slo:
            return False
        return True
    for fid in model.workflow.function_ids:
        pid = placement.platform_for(fid)
        if config.budget is not None and model.function_cost_of(fid, pid) > config.budget:
            return False
        if (
            config.latency_slo is not None
            and model.function_latency_of(fid, pid) > config.latency_slo
        ):
            return False
    return True


def optimize(
    workflow: WorkflowSpec,
    platforms: Sequence[str],
    model: PlacementModel,
    config: OptimizationConfig | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> OptimizationResult:
    """Minimize alpha*cost + beta*latency over feasible placements.

    Ties (objectives within 1e-9) break deterministically on lower cost, then
    lower latency, then enumeration order. Raises InfeasibleError carrying the
    anchors when no placement satisfies both constraints.
    """
    config = config or OptimizationConfig()
    c_star, c_arg = min_cost(workflow, platforms, model, cap)
    t_star, t_arg = min_time(workflow, platforms, model, cap)
    if config.weight_mode == "auto_pareto":
        alpha, beta = auto_weights(c_star, t_star)
    else:
        alpha, beta = config.alpha, config.beta

    best: tuple[Decimal, Decimal, Decimal, Placement] | None = None
    feasible_count = 0
    total_count = 0
    for placement in enumerate_placements(workflow, platforms, cap):
        total_count += 1
        cost = model.cost_of(placement)
        latency = model.latency_of(placement)
        if not _is_feasible(model, placement, cost, latency, config):
            continue
        feasible_count += 1
        objective = CONTEXT.multiply(alpha, cost) + CONTEXT.multiply(beta, latency)
        if best is None or _improves((objective, cost, latency), best[:3]):
            best = (objective, cost, latency, placement)

    if best is None:
        diagnostics = {
            "min_cost_placement": str(c_arg),
            "min_time_placement": str(t_arg),
        }
        if config.budget is not None:
            diagnostics["cost_gap"] = max(ZERO, c_star - config.budget)
        if config.latency_slo is not None:
            diagnostics["latency_gap"] = max(ZERO, t_star - config.latency_slo)
        raise InfeasibleError(
            c_star, t_star, config.budget, config.latency_slo, diagnostics
        )

    objective, cost, latency, placement = best
    return OptimizationResult(
        best=placement,
        cost=cost,
        latency=latency,
        objective=float(objective),
        alpha=float(alpha),
        beta=float(beta),
        c_star=c_star,
        t_star=t_star,
        c_star_placement=c_arg,
        t_star_placement=t_arg,
        feasible_count=feasible_count,
        total_count=total_count,
    )


def _improves(candidate, incumbent) -> bool:
    obj_c, cost_c, lat_c = candidate
    obj_i, cost_i, lat_i = incumbent
    if obj_c < obj_i - OBJECTIVE_TOLERANCE:
        return True
    if obj_c > obj_i + OBJECTIVE_TOLERANCE:
        return False
    if cost_c != cost_i:
        return cost_c < cost_i
    if lat_c != lat_i:
        return lat_c < lat_i
    return False
