"""Usage-log ingestion and aggregation into calibration statistics.

Logs are CSV with the exact header
``timestamp,function_id,platform_id,duration_ms,bytes_in,bytes_out,status``
(UTF-8, RFC-4180 quoting). Only ok-status records feed the statistics; error
rows are counted and reported but never priced or averaged.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

from .errors import CoverageError, HeaderError, NoDataError, RowError
from .money import CONTEXT, div
from .workflow import FunctionProfile, LatencyTable, WorkflowSpec

USAGE_FIELDS = (
    "timestamp",
    "function_id",
    "platform_id",
    "duration_ms",
    "bytes_in",
    "bytes_out",
    "status",
)

USAGE_HEADER = ",".join(USAGE_FIELDS)

STATUSES = ("ok", "error")

BYTES_PER_GB = Decimal(10) ** 9  # decimal GB, the cloud billing convention

#: Aggregated means are quantized here so merge order can never matter.
MEAN_QUANTUM = Decimal("1e-9")


@dataclass(frozen=True)
class UsageRecord:
    timestamp: datetime
    function_id: str
    platform_id: str
    duration_ms: Decimal
    bytes_in: int
    bytes_out: int
    status: str


@dataclass(frozen=True)
class LatencyStats:
    """Latency summary of the ok-status records for one (function, platform)."""

    count: int
    mean: Decimal
    min: Decimal
    max: Decimal
    p90: Decimal


@dataclass(frozen=True)
class UsageSummary:
    """LatencyStats plus byte totals and the excluded-error tally."""

    stats: LatencyStats
    ok_count: int
    error_count: int
    bytes_in_total: int
    bytes_out_total: int


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def _parse_row(line: int, row: Sequence[str]) -> UsageRecord:
    if len(row) != len(USAGE_FIELDS):
        raise RowError(line, f"expected {len(USAGE_FIELDS)} fields, got {len(row)}")
    raw = dict(zip(USAGE_FIELDS, row))
    try:
        timestamp = _parse_timestamp(raw["timestamp"])
    except ValueError:
        raise RowError(line, f"bad timestamp {raw['timestamp']!r}") from None
    try:
        duration = Decimal(raw["duration_ms"])
    except Exception:
        raise RowError(line, f"bad duration_ms {raw['duration_ms']!r}") from None
    if not duration.is_finite() or duration < 0:
        raise RowError(line, f"duration_ms must be finite and >= 0, got {raw['duration_ms']!r}")
    counts = {}
    for key in ("bytes_in", "bytes_out"):
        try:
            counts[key] = int(raw[key])
        except ValueError:
            raise RowError(line, f"bad {key} {raw[key]!r}") from None
        if counts[key] < 0:
            raise RowError(line, f"{key} must be >= 0, got {raw[key]!r}")
    if raw["status"] not in STATUSES:
        raise RowError(line, f"status must be ok or error, got {raw['status']!r}")
    return UsageRecord(
        timestamp=timestamp,
        function_id=raw["function_id"],
        platform_id=raw["platform_id"],
        duration_ms=duration,
        bytes_in=counts["bytes_in"],
        bytes_out=counts["bytes_out"],
        status=raw["status"],
    )


def scan_usage_log(source: str | Path | IO[str]) -> tuple[list[UsageRecord], list[RowError]]:
    """Parse every row, collecting per-row errors instead of stopping."""
    if hasattr(source, "read"):
        return _scan(source)
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _scan(fh)


def _scan(fh: IO[str]) -> tuple[list[UsageRecord], list[RowError]]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderError("usage log is empty; expected header row") from None
    if header != list(USAGE_FIELDS):
        raise HeaderError(f"expected header {USAGE_HEADER!r}, got {','.join(header)!r}")
    records: list[UsageRecord] = []
    errors: list[RowError] = []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            records.append(_parse_row(line, row))
        except RowError as exc:
            errors.append(exc)
    return records, errors


def parse_usage_log(source: str | Path | IO[str]) -> list[UsageRecord]:
    """Parse a usage log in file order; raises on the first malformed row."""
    records, errors = scan_usage_log(source)
    if errors:
        raise errors[0]
    return records


def _nearest_rank_p90(sorted_values: Sequence[Decimal]) -> Decimal:
    count = len(sorted_values)
    rank = -((-9 * count) // 10)  # ceil(0.9 * count), exact integer math
    return sorted_values[rank - 1]


def _mean(values: Sequence[Decimal]) -> Decimal:
    total = sum(values, Decimal(0))
    return CONTEXT.quantize(div(total, Decimal(len(values))), MEAN_QUANTUM)


def aggregate_stats(
    records: Iterable[UsageRecord], function_id: str, platform_id: str
) -> LatencyStats:
    """Latency statistics over the matching ok-status records.

    Mean is the arithmetic mean; p90 uses the nearest-rank method (the value
    at 1-based index ceil(0.9 * count) of the ascending sort).
    """
    durations = sorted(
        r.duration_ms
        for r in records
        if r.status == "ok" and r.function_id == function_id and r.platform_id == platform_id
    )
    if not durations:
        raise NoDataError(f"no ok records for ({function_id}, {platform_id})")
    return LatencyStats(
        count=len(durations),
        mean=_mean(durations),
        min=durations[0],
        max=durations[-1],
        p90=_nearest_rank_p90(durations),
    )


def summarize_usage(records: Iterable[UsageRecord]) -> dict[tuple[str, str], UsageSummary]:
    """Group records by (function, platform) and aggregate each group."""
    records = list(records)
    groups: dict[tuple[str, str], list[UsageRecord]] = {}
    for r in records:
        groups.setdefault((r.function_id, r.platform_id), []).append(r)
    out: dict[tuple[str, str], UsageSummary] = {}
    for key in sorted(groups):
        ok = [r for r in groups[key] if r.status == "ok"]
        errors = len(groups[key]) - len(ok)
        if not ok:
            continue
        out[key] = UsageSummary(
            stats=aggregate_stats(ok, *key),
            ok_count=len(ok),
            error_count=errors,
            bytes_in_total=sum(r.bytes_in for r in ok),
            bytes_out_total=sum(r.bytes_out for r in ok),
        )
    return out


def calibrate(
    workflow: WorkflowSpec,
    summaries: Mapping[tuple[str, str], UsageSummary],
    required_pairs: Iterable[tuple[str, str]] | None = None,
) -> tuple[WorkflowSpec, LatencyTable]:
    """Fold measured statistics into the workflow's profiles and latency table.

    Latency entries are the per-pair means. Each profile's r_in/r_out become
    its overall mean bytes per request, in decimal GB. Pairs listed in
    required_pairs but absent from the summaries raise CoverageError.
    """
    if required_pairs is not None:
        missing = sorted(set(required_pairs) - set(summaries))
        if missing:
            raise CoverageError(missing)

    entries = {key: summary.stats.mean for key, summary in summaries.items()}

    profiles: list[FunctionProfile] = []
    for profile in workflow.functions:
        mine = [s for (fid, _), s in summaries.items() if fid == profile.function_id]
        if not mine:
            profiles.append(profile)
            continue
        count = sum(s.ok_count for s in mine)
        r_in = _bytes_to_gb(sum(s.bytes_in_total for s in mine), count)
        r_out = _bytes_to_gb(sum(s.bytes_out_total for s in mine), count)
        profiles.append(dataclasses.replace(profile, r_in=r_in, r_out=r_out))

    calibrated = WorkflowSpec(
        workflow_id=workflow.workflow_id, functions=tuple(profiles), edges=workflow.edges
    )
    return calibrated, LatencyTable(entries=entries)


def _bytes_to_gb(total_bytes: int, count: int) -> Decimal:
    per_request = div(Decimal(total_bytes), Decimal(count))
    return CONTEXT.quantize(div(per_request, BYTES_PER_GB), Decimal("1e-12"))
