"""Cost modeling and placement trade-off analysis for serverless workflows.

The package prices workflows across heterogeneous platforms (edge, cloud,
space), decomposes every charge into five drivers, models cost as an affine
function of request volume with closed-form break-even points, and solves the
budget/latency-constrained placement problem with auto-derived weights.
"""

__version__ = "0.1.0"

from .catalog import (
    DriverCategory,
    Layer,
    PlatformCatalog,
    PriceComponent,
    RateUnit,
    ValidationIssue,
    load_catalog,
    load_platform,
    normalize_rate,
    serialize_catalog,
    validate_catalog,
)
from .engine import (
    COINCIDENT_CURVES,
    ComponentCharge,
    CostBreakdown,
    CostCurve,
    CrossoverPoint,
    baas_cost,
    component_charges,
    compute_cost,
    crossover,
    driver_shares,
    function_cost,
    function_cost_curve,
    invocation_cost,
    per_function_costs,
    state_cost,
    transfer_cost,
    workflow_cost,
    workflow_cost_curve,
)
from .optimizer import (
    CatalogModel,
    OptimizationConfig,
    OptimizationResult,
    ParetoPoint,
    PlacementModel,
    PointTableModel,
    auto_weights,
    enumerate_placements,
    load_point_table,
    min_cost,
    min_time,
    optimal_line,
    optimize,
    pareto_front,
)
from .telemetry import (
    LatencyStats,
    UsageRecord,
    UsageSummary,
    aggregate_stats,
    calibrate,
    parse_usage_log,
    scan_usage_log,
    summarize_usage,
)
from .workflow import (
    BaasUsage,
    FunctionProfile,
    LatencyTable,
    Placement,
    WorkflowSpec,
    load_workflow,
    load_workflow_document,
    workflow_latency,
)
