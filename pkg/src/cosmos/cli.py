"""Command-line interface: reproducible cost, crossover, trade-off, and ingest reports.

Exit codes: 0 success, 2 input validation failure, 3 computation failure,
4 infeasible optimization. Display values round half-even to 4 decimals;
files written under --out carry full precision and re-ingest losslessly.
Every report directory also receives a run manifest with content digests of
all inputs, so identical inputs are recognizable by identical digests.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from decimal import Decimal
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from .catalog import PlatformCatalog, catalog_dir, load_catalog, load_platform
from .engine import (
    COINCIDENT_CURVES,
    DRIVER_FIELDS,
    component_charges,
    crossover,
    driver_shares,
    function_cost,
    function_cost_curve,
    per_function_costs,
    workflow_cost,
    workflow_cost_curve,
)
from .errors import (
    CapExceededError,
    CosmosError,
    CoverageError,
    CycleError,
    DegenerateAnchorError,
    DomainError,
    DuplicateIdError,
    HeaderError,
    InfeasibleError,
    MissingLatencyError,
    NegativeRateError,
    NoDataError,
    RowError,
    SchemaError,
    UnitError,
    UnknownComponentError,
    UnknownFunctionError,
    UnknownPlatformError,
    UnplacedFunctionError,
)
from .money import dec, fmt, fmt_full
from .optimizer import (
    CatalogModel,
    OptimizationConfig,
    ParetoPoint,
    PointTableModel,
    load_point_table,
    optimal_line,
    optimize,
    pareto_front,
)
from .telemetry import calibrate, scan_usage_log, summarize_usage
from .workflow import LatencyTable, Placement, WorkflowSpec, load_workflow_document

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_INFEASIBLE = 4

_VALIDATION_ERRORS = (
    SchemaError,
    UnitError,
    DuplicateIdError,
    NegativeRateError,
    CycleError,
    UnknownFunctionError,
    UnknownPlatformError,
    UnknownComponentError,
    UnplacedFunctionError,
    MissingLatencyError,
    HeaderError,
    RowError,
    CoverageError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)

_COMPUTATION_ERRORS = (DomainError, NoDataError, DegenerateAnchorError, CapExceededError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key, value in sorted(exc.diagnostics.items()):
            print(f"  {key}: {value}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _COMPUTATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except CosmosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except Exception as exc:  # exit codes are a contract: nothing else may leak out
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cosmos",
        description="Cost and performance trade-off reports for serverless workflows",
    )
    parser.add_argument("--version", action="version", version=f"cosmos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, placement=True, volume=True):
        p.add_argument("--workflow", required=True, help="workflow document path")
        p.add_argument("--catalog", action="append", default=[], help="catalog document path (repeatable)")
        p.add_argument("--platform", action="append", default=[],
                       help="platform id resolved against the catalog directory (repeatable)")
        if placement:
            p.add_argument("--assign", action="append", default=[], metavar="FUNCTION=PLATFORM",
                           help="assign one function to a platform (repeatable)")
        if volume:
            p.add_argument("--volume", help="request volume overriding every function's own count")
        p.add_argument("--out", help="directory for report files and the run manifest")
        p.add_argument("--format", choices=("csv", "json", "tsv"), default=None,
                       help="print machine-readable output instead of the table view")

    p_cost = sub.add_parser("cost", help="per-function and workflow cost breakdown")
    common(p_cost)
    p_cost.set_defaults(handler=cmd_cost)

    p_break = sub.add_parser("breakdown", help="per-driver shares and component itemization")
    common(p_break)
    p_break.set_defaults(handler=cmd_breakdown)

    p_curve = sub.add_parser("curve", help="cost-vs-volume line and sampled points")
    common(p_curve, volume=False)
    p_curve.add_argument("--function", help="limit to one function's curve")
    p_curve.add_argument("--sample", action="append", default=[],
                         help="request volume to tabulate (repeatable)")
    p_curve.set_defaults(handler=cmd_curve)

    p_cross = sub.add_parser("crossover", help="break-even volume between two platforms")
    common(p_cross, placement=False, volume=False)
    p_cross.add_argument("--function", help="compare one function instead of the whole workflow")
    p_cross.set_defaults(handler=cmd_crossover)

    p_pareto = sub.add_parser("pareto", help="evaluated points, dominance front, and trade-off line")
    common(p_pareto, placement=False)
    p_pareto.add_argument("--points", help="measured (function, platform) point table document")
    p_pareto.set_defaults(handler=cmd_pareto)

    p_opt = sub.add_parser("optimize", help="constrained weighted placement optimization")
    common(p_opt, placement=False)
    p_opt.add_argument("--points", help="measured (function, platform) point table document")
    p_opt.add_argument("--budget", help="maximum workflow cost in USD")
    p_opt.add_argument("--latency-slo", help="maximum workflow latency in ms")
    p_opt.add_argument("--scope", choices=("workflow", "per-function"), default="workflow")
    p_opt.add_argument("--alpha", help="manual cost weight (1/USD); requires --beta")
    p_opt.add_argument("--beta", help="manual latency weight (1/ms); requires --alpha")
    p_opt.set_defaults(handler=cmd_optimize)

    p_ingest = sub.add_parser("ingest", help="aggregate a usage log into latency statistics")
    p_ingest.add_argument("--log", required=True, help="usage log CSV path")
    p_ingest.add_argument("--workflow", help="workflow document to calibrate")
    p_ingest.add_argument("--out", help="directory for report files and the run manifest")
    p_ingest.add_argument("--format", choices=("csv", "json", "tsv"), default=None)
    p_ingest.set_defaults(handler=cmd_ingest)

    return parser


# --- shared plumbing --------------------------------------------------------


def _load_catalogs(args) -> dict[str, PlatformCatalog]:
    catalogs: dict[str, PlatformCatalog] = {}
    for path in args.catalog:
        loaded = load_catalog(path)
        catalogs[loaded.platform_id] = loaded
    for pid in args.platform:
        if pid not in catalogs:
            catalogs[pid] = load_platform(pid)
    if not catalogs:
        raise SchemaError("no catalogs given; use --catalog or --platform")
    return catalogs


def _load_workflow(args) -> tuple[WorkflowSpec, LatencyTable | None]:
    return load_workflow_document(args.workflow)


def _placement(args, workflow: WorkflowSpec, catalogs: Mapping[str, PlatformCatalog]) -> Placement:
    assigns = getattr(args, "assign", [])
    if assigns:
        mapping: dict[str, str] = {}
        for item in assigns:
            if "=" not in item:
                raise SchemaError(f"--assign expects FUNCTION=PLATFORM, got {item!r}")
            fid, pid = item.split("=", 1)
            mapping[fid] = pid
        missing = [fid for fid in workflow.function_ids if fid not in mapping]
        if missing:
            raise UnplacedFunctionError(f"--assign misses function(s): {missing}")
        unknown = [fid for fid in mapping if fid not in workflow.function_ids]
        if unknown:
            raise UnknownFunctionError(f"--assign names unknown function(s): {unknown}")
        placement = Placement.of({fid: mapping[fid] for fid in workflow.function_ids})
    elif len(args.platform) == 1 and not args.catalog:
        placement = Placement.uniform(workflow, args.platform[0])
    elif len(catalogs) == 1:
        placement = Placement.uniform(workflow, next(iter(catalogs)))
    else:
        raise SchemaError("give --assign pairs or exactly one platform for a uniform placement")
    for pid in placement.platforms():
        if pid not in catalogs:
            raise UnknownPlatformError(f"no catalog loaded for platform {pid!r}")
    return placement


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(args, out_dir: Path, outputs: list[str]) -> None:
    inputs = []
    for attr in ("workflow", "log", "points"):
        value = getattr(args, attr, None)
        if value:
            inputs.append(Path(value))
    inputs.extend(Path(p) for p in getattr(args, "catalog", []))
    for pid in getattr(args, "platform", []):
        candidate = catalog_dir() / f"{pid}.json"
        if candidate.exists():
            inputs.append(candidate)
    records = [{"path": str(p), "sha256": _sha256(p)} for p in sorted(inputs)]
    combined = hashlib.sha256("".join(r["sha256"] for r in records).encode()).hexdigest()
    manifest = {
        "command": args.command,
        "inputs": records,
        "catalog_ids": sorted(getattr(args, "platform", [])) or None,
        "outputs": sorted(outputs),
        "version": __version__,
        "input_digest": combined,
    }
    _dump_json(out_dir / "manifest.json", manifest)


def _dump_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=str, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _emit(args, name: str, files: dict[str, str | dict | list]) -> None:
    """Write report files plus the run manifest when --out is given."""
    if not args.out:
        return
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, payload in files.items():
        target = out_dir / filename
        if isinstance(payload, str):
            target.write_text(payload, encoding="utf-8")
        else:
            _dump_json(target, payload)
        written.append(filename)
    written.append("manifest.json")
    _write_manifest(args, out_dir, written)


def _money_row(breakdown) -> dict[str, str]:
    return {k: fmt_full(v) for k, v in breakdown.as_dict().items()}


def _breakdown_csv(rows: list[tuple[str, str, object]]) -> str:
    lines = ["function,platform,invocation,compute,baas,transfer,state,total"]
    for fid, pid, b in rows:
        lines.append(
            ",".join(
                [fid, pid]
                + [fmt_full(v) for v in (b.invocation, b.compute, b.baas, b.transfer, b.state, b.total)]
            )
        )
    return "\n".join(lines) + "\n"


def _print(args, table_lines: list[str], machine: dict[str, str]) -> None:
    """Print the table view, or the machine format selected by --format."""
    if args.format:
        sys.stdout.write(machine[args.format])
    else:
        print("\n".join(table_lines))


# --- subcommands ------------------------------------------------------------


def cmd_cost(args) -> int:
    workflow, latencies = _load_workflow(args)
    catalogs = _load_catalogs(args)
    placement = _placement(args, workflow, catalogs)
    volume = dec(args.volume) if args.volume is not None else None

    parts = per_function_costs(workflow, placement, catalogs, latencies=latencies, volume=volume)
    total = workflow_cost(workflow, placement, catalogs, latencies=latencies, volume=volume)

    rows = [(fid, placement.platform_for(fid), b) for fid, b in parts.items()]
    rows.append(("workflow", _placement_label(placement), total))
    csv_text = _breakdown_csv(rows)
    report = {
        "workflow_id": workflow.workflow_id,
        "volume": fmt_full(volume) if volume is not None else None,
        "placement": placement.as_dict(),
        "functions": {
            fid: {"platform": placement.platform_for(fid), **_money_row(b)}
            for fid, b in parts.items()
        },
        "workflow": _money_row(total),
    }

    header = f"{'function':<18} {'platform':<16} " + " ".join(f"{c:>12}" for c in (*DRIVER_FIELDS, "total"))
    lines = [header]
    for fid, pid, b in rows:
        cells = [fmt(getattr(b, c)) for c in (*DRIVER_FIELDS, "total")]
        lines.append(f"{fid:<18} {pid:<16} " + " ".join(f"{c:>12}" for c in cells))
    _print(args, lines, {"csv": csv_text, "json": json.dumps(report, indent=2, sort_keys=True) + "\n",
                         "tsv": csv_text.replace(",", "\t")})
    _emit(args, "cost", {"cost.csv": csv_text, "cost.json": report})
    return EXIT_OK


def _placement_label(placement: Placement) -> str:
    platforms = set(placement.platforms())
    return platforms.pop() if len(platforms) == 1 else "mixed"


def cmd_breakdown(args) -> int:
    workflow, latencies = _load_workflow(args)
    catalogs = _load_catalogs(args)
    placement = _placement(args, workflow, catalogs)
    volume = dec(args.volume) if args.volume is not None else None

    lines = []
    report_functions = {}
    csv_lines = ["function,platform,component,driver,amount"]
    for profile in workflow.functions:
        fid = profile.function_id
        pid = placement.platform_for(fid)
        catalog = catalogs[pid]
        latency_ms = None
        if catalog.per_ms_priced:
            if latencies is None:
                raise MissingLatencyError(fid, pid)
            latency_ms = latencies.get(fid, pid)
        charges = component_charges(profile, catalog, latency_ms=latency_ms, volume=volume)
        breakdown = function_cost(profile, catalog, latency_ms=latency_ms, volume=volume)
        shares = driver_shares(breakdown)
        lines.append(f"{fid} on {pid} (total {fmt(breakdown.total)})")
        for item in charges:
            lines.append(f"  {item.component_id:<20} {item.driver.value:<16} {fmt(item.amount):>12}")
            csv_lines.append(
                ",".join([fid, pid, item.component_id, item.driver.value, fmt_full(item.amount)])
            )
        lines.append(
            "  shares: " + ", ".join(f"{name} {fmt(shares[name], 1)}%" for name in DRIVER_FIELDS)
        )
        report_functions[fid] = {
            "platform": pid,
            "components": [
                {
                    "component_id": i.component_id,
                    "driver": i.driver.value,
                    "amount": fmt_full(i.amount),
                }
                for i in charges
            ],
            "subtotals": _money_row(breakdown),
            "shares_percent": {name: fmt_full(shares[name]) for name in DRIVER_FIELDS},
        }
    report = {"workflow_id": workflow.workflow_id,
              "volume": fmt_full(volume) if volume is not None else None,
              "functions": report_functions}
    csv_text = "\n".join(csv_lines) + "\n"
    _print(args, lines, {"csv": csv_text, "json": json.dumps(report, indent=2, sort_keys=True) + "\n",
                         "tsv": csv_text.replace(",", "\t")})
    _emit(args, "breakdown", {"breakdown.csv": csv_text, "breakdown.json": report})
    return EXIT_OK


DEFAULT_SAMPLES = ("0", "1000000", "20000000", "40000000", "60000000")


def cmd_curve(args) -> int:
    workflow, latencies = _load_workflow(args)
    catalogs = _load_catalogs(args)
    placement = _placement(args, workflow, catalogs)
    curve = _curve_for(args.function, workflow, placement, catalogs, latencies)

    samples = args.sample or list(DEFAULT_SAMPLES)
    rows = [(dec(s), curve.evaluate(dec(s))) for s in samples]
    tsv_lines = ["n_requests\tcost_usd"] + [f"{fmt_full(n)}\t{fmt_full(c)}" for n, c in rows]
    tsv_text = "\n".join(tsv_lines) + "\n"
    report = {
        "fixed": fmt_full(curve.fixed),
        "slope_per_request": fmt_full(curve.slope),
        "slope_per_million": fmt_full(curve.slope * Decimal(10**6)),
        "samples": [{"n": fmt_full(n), "cost": fmt_full(c)} for n, c in rows],
    }
    lines = [
        f"fixed: {fmt(curve.fixed)}",
        f"slope per 1M requests: {fmt(curve.slope * Decimal(10**6))}",
        "n_requests -> cost:",
    ] + [f"  {fmt_full(n):>14} {fmt(c):>14}" for n, c in rows]
    _print(args, lines, {"tsv": tsv_text, "csv": tsv_text.replace("\t", ","),
                         "json": json.dumps(report, indent=2, sort_keys=True) + "\n"})
    _emit(args, "curve", {"curve.tsv": tsv_text, "curve.json": report})
    return EXIT_OK


def _curve_for(function, workflow, placement, catalogs, latencies):
    if function:
        profile = workflow.function(function)
        pid = placement.platform_for(function)
        catalog = catalogs[pid]
        latency_ms = None
        if catalog.per_ms_priced:
            if latencies is None:
                raise MissingLatencyError(function, pid)
            latency_ms = latencies.get(function, pid)
        return function_cost_curve(profile, catalog, latency_ms=latency_ms)
    return workflow_cost_curve(workflow, placement, catalogs, latencies=latencies)


def cmd_crossover(args) -> int:
    workflow, latencies = _load_workflow(args)
    catalogs = _load_catalogs(args)
    if len(args.platform) != 2:
        raise SchemaError("crossover needs exactly two --platform ids")
    first, second = args.platform
    curves = [
        _curve_for(args.function, workflow, Placement.uniform(workflow, pid), catalogs, latencies)
        for pid in (first, second)
    ]
    point = crossover(curves[0], curves[1])

    if point is COINCIDENT_CURVES:
        lines = [f"{first} and {second}: coincident curves (equal cost at every volume)"]
        report = {"result": "coincident"}
    elif point is None:
        lines = [f"{first} and {second}: none (no crossover at nonnegative volume)"]
        report = {"result": "none"}
    else:
        lines = [
            f"crossover of {first} vs {second}"
            + (f" for {args.function}" if args.function else " for the workflow"),
            f"  n* = {fmt_full(point.n_star.quantize(Decimal('1')))} requests"
            f" ({fmt(point.n_star_millions)}M)",
            f"  cost at crossover: {fmt(point.cost)}",
        ]
        report = {
            "result": "crossover",
            "n_star_requests": fmt_full(point.n_star),
            "n_star_millions": fmt_full(point.n_star_millions),
            "cost": fmt_full(point.cost),
        }
    report.update({"left": first, "right": second, "function": args.function})
    json_text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    tsv = "left\tright\tresult\n" + f"{first}\t{second}\t{report['result']}\n"
    _print(args, lines, {"json": json_text, "csv": tsv.replace("\t", ","), "tsv": tsv})
    _emit(args, "crossover", {"crossover.json": report})
    return EXIT_OK


def _points_and_model(args, workflow, latencies):
    """Build the evaluated point set and matching placement model."""
    if getattr(args, "points", None):
        table = load_point_table(args.points)
        model = PointTableModel(workflow, table)
        platforms = sorted({pid for _, pid in table})
        points = [
            ParetoPoint(label=f"{fid}@{pid}", cost=cost, latency=latency)
            for (fid, pid), (cost, latency) in sorted(table.items())
        ]
        return points, model, platforms
    catalogs = _load_catalogs(args)
    if latencies is None:
        raise SchemaError(
            "workflow document has no latency block; give --points or add latencies"
        )
    volume = dec(args.volume) if getattr(args, "volume", None) is not None else None
    model = CatalogModel(workflow, catalogs, latencies=latencies, volume=volume)
    platforms = sorted(catalogs)
    return model.points(platforms), model, platforms


def cmd_pareto(args) -> int:
    workflow, latencies = _load_workflow(args)
    points, _, _ = _points_and_model(args, workflow, latencies)
    front = pareto_front(points)
    line = optimal_line(points)
    front_keys = {(p.cost, p.latency) for p in front}
    line_keys = {(p.cost, p.latency) for p in line}

    ordered = sorted(points, key=lambda p: (p.latency, p.cost, p.label))
    tsv_lines = ["label\tlatency_ms\tcost_usd\ton_front\ton_line"]
    for p in ordered:
        tsv_lines.append(
            f"{p.label}\t{fmt_full(p.latency)}\t{fmt_full(p.cost)}"
            f"\t{int((p.cost, p.latency) in front_keys)}\t{int((p.cost, p.latency) in line_keys)}"
        )
    tsv_text = "\n".join(tsv_lines) + "\n"
    report = {
        "points": [
            {"label": p.label, "latency_ms": fmt_full(p.latency), "cost": fmt_full(p.cost)}
            for p in ordered
        ],
        "front": [
            {"label": p.label, "latency_ms": fmt_full(p.latency), "cost": fmt_full(p.cost)}
            for p in front
        ],
        "optimal_line": [
            {"label": p.label, "latency_ms": fmt_full(p.latency), "cost": fmt_full(p.cost)}
            for p in line
        ],
    }
    lines = [f"evaluated {len(points)} points; {len(front)} on the front, {len(line)} on the trade-off line"]
    for p in ordered:
        marks = ("front" if (p.cost, p.latency) in front_keys else "") + (
            " line" if (p.cost, p.latency) in line_keys else ""
        )
        lines.append(f"  {p.label:<34} {fmt(p.latency):>10} ms {fmt(p.cost):>14} USD  {marks.strip()}")
    _print(args, lines, {"tsv": tsv_text, "csv": tsv_text.replace("\t", ","),
                         "json": json.dumps(report, indent=2, sort_keys=True) + "\n"})
    _emit(args, "pareto", {"pareto.tsv": tsv_text, "pareto.json": report})
    return EXIT_OK


def cmd_optimize(args) -> int:
    workflow, latencies = _load_workflow(args)
    points, model, platforms = _points_and_model(args, workflow, latencies)
    manual = args.alpha is not None or args.beta is not None
    if manual and (args.alpha is None or args.beta is None):
        raise SchemaError("manual weighting needs both --alpha and --beta")
    config = OptimizationConfig(
        budget=dec(args.budget) if args.budget is not None else None,
        latency_slo=dec(args.latency_slo) if args.latency_slo is not None else None,
        weight_mode="manual" if manual else "auto_pareto",
        alpha=dec(args.alpha) if manual else None,
        beta=dec(args.beta) if manual else None,
        scope=args.scope.replace("-", "_"),
    )
    result = optimize(workflow, platforms, model, config)

    front = pareto_front(points)
    report = {
        "placement": result.best.as_dict(),
        "cost": fmt_full(result.cost),
        "latency_ms": fmt_full(result.latency),
        "objective": result.objective,
        "alpha": result.alpha,
        "beta": result.beta,
        "c_star": fmt_full(result.c_star),
        "t_star": fmt_full(result.t_star),
        "c_star_placement": result.c_star_placement.as_dict(),
        "t_star_placement": result.t_star_placement.as_dict(),
        "feasible_count": result.feasible_count,
        "total_count": result.total_count,
        "front": [
            {"label": p.label, "latency_ms": fmt_full(p.latency), "cost": fmt_full(p.cost)}
            for p in front
        ],
    }
    lines = ["chosen placement:"]
    lines += [f"  {fid} -> {pid}" for fid, pid in result.best.assignments]
    lines += [
        f"cost: {fmt(result.cost)} USD",
        f"latency: {fmt(result.latency)} ms",
        f"objective: {result.objective:.6f} (alpha={result.alpha:.7f}, beta={result.beta:.7f})",
        f"anchors: C*={fmt(result.c_star)} USD, T*={fmt(result.t_star)} ms",
        f"feasible placements: {result.feasible_count} of {result.total_count}",
    ]
    tsv = "\n".join(
        ["label\tlatency_ms\tcost_usd"]
        + [f"{p.label}\t{fmt_full(p.latency)}\t{fmt_full(p.cost)}" for p in front]
    ) + "\n"
    _print(args, lines, {"json": json.dumps(report, indent=2, sort_keys=True) + "\n",
                         "tsv": tsv, "csv": tsv.replace("\t", ",")})
    _emit(args, "optimize", {"optimize.json": report, "front.tsv": tsv})
    return EXIT_OK


def cmd_ingest(args) -> int:
    records, errors = scan_usage_log(args.log)
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        print(f"error: {len(errors)} malformed row(s) in {args.log}", file=sys.stderr)
        return EXIT_VALIDATION
    if not records:
        raise NoDataError(f"usage log {args.log} has no data rows")
    summaries = summarize_usage(records)

    csv_lines = ["function_id,platform_id,count,mean_ms,min_ms,max_ms,p90_ms,errors"]
    lines = [
        f"{'function':<18} {'platform':<16} {'count':>6} {'mean':>10} {'min':>8} "
        f"{'max':>8} {'p90':>8} {'errors':>6}"
    ]
    for (fid, pid), summary in summaries.items():
        s = summary.stats
        csv_lines.append(
            ",".join([fid, pid, str(s.count), fmt_full(s.mean), fmt_full(s.min),
                      fmt_full(s.max), fmt_full(s.p90), str(summary.error_count)])
        )
        lines.append(
            f"{fid:<18} {pid:<16} {s.count:>6} {fmt(s.mean):>10} {fmt(s.min, 1):>8} "
            f"{fmt(s.max, 1):>8} {fmt(s.p90, 1):>8} {summary.error_count:>6}"
        )
    csv_text = "\n".join(csv_lines) + "\n"
    report = {
        f"{fid}:{pid}": {
            "count": summary.stats.count,
            "mean_ms": fmt_full(summary.stats.mean),
            "min_ms": fmt_full(summary.stats.min),
            "max_ms": fmt_full(summary.stats.max),
            "p90_ms": fmt_full(summary.stats.p90),
            "errors": summary.error_count,
        }
        for (fid, pid), summary in summaries.items()
    }
    files: dict[str, str | dict] = {"stats.csv": csv_text, "stats.json": report}

    if args.workflow:
        workflow, _ = load_workflow_document(args.workflow)
        calibrated, table = calibrate(workflow, summaries)
        entries: dict[str, dict[str, str]] = {}
        for (fid, pid), ms in sorted(table.entries.items()):
            entries.setdefault(fid, {})[pid] = fmt_full(ms)
        files["calibrated-workflow.json"] = {
            "workflow_id": calibrated.workflow_id,
            "functions": [
                {
                    "function_id": f.function_id,
                    "n": fmt_full(f.n),
                    "t": fmt_full(f.t),
                    "mem": fmt_full(f.mem),
                    "d": fmt_full(f.d),
                    "d_per_request": fmt_full(f.d_per_request),
                    "r_in": fmt_full(f.r_in),
                    "r_out": fmt_full(f.r_out),
                    "workload_class": f.workload_class,
                    "baas_usage": [
                        {
                            "component_id": u.component_id,
                            "quantity": fmt_full(u.quantity),
                            **({"platforms": sorted(u.platforms)} if u.platforms else {}),
                        }
                        for u in f.baas_usage
                    ],
                    "t_overrides": {p: fmt_full(t) for p, t in sorted(f.t_overrides.items())},
                }
                for f in calibrated.functions
            ],
            "edges": [list(e) for e in calibrated.edges],
            "latency": {"entries": entries},
        }
    _print(args, lines, {"csv": csv_text, "tsv": csv_text.replace(",", "\t"),
                         "json": json.dumps(report, indent=2, sort_keys=True) + "\n"})
    _emit(args, "ingest", files)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
