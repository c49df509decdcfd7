import io
import random
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from cosmos.errors import CoverageError, HeaderError, NoDataError, RowError
from cosmos.telemetry import (
    USAGE_HEADER,
    LatencyStats,
    UsageRecord,
    UsageSummary,
    aggregate_stats,
    calibrate,
    parse_usage_log,
    scan_usage_log,
    summarize_usage,
)
from cosmos.workflow import FunctionProfile, WorkflowSpec

D = Decimal


def _log(*rows):
    return io.StringIO("\n".join([USAGE_HEADER, *rows]) + "\n")


def _row(duration, fid="f", pid="p", status="ok", bytes_in=0, bytes_out=0):
    return f"2024-11-04T09:00:00Z,{fid},{pid},{duration},{bytes_in},{bytes_out},{status}"


def _record(duration, fid="f", pid="p", status="ok", bytes_in=0, bytes_out=0):
    import datetime

    return UsageRecord(
        timestamp=datetime.datetime(2024, 11, 4, 9, 0, tzinfo=datetime.timezone.utc),
        function_id=fid,
        platform_id=pid,
        duration_ms=D(duration),
        bytes_in=bytes_in,
        bytes_out=bytes_out,
        status=status,
    )


# --- parsing -----------------------------------------------------------------


def test_parse_well_formed_rows():
    records = parse_usage_log(_log(_row(100), _row(200), _row(300)))
    assert len(records) == 3
    assert [r.duration_ms for r in records] == [D(100), D(200), D(300)]


def test_negative_duration_is_row_error_with_line():
    with pytest.raises(RowError) as exc:
        parse_usage_log(_log(_row(100), _row(-5)))
    assert exc.value.line == 3


def test_empty_body_with_header_is_empty_list():
    assert parse_usage_log(_log()) == []


def test_missing_header_is_header_error():
    with pytest.raises(HeaderError):
        parse_usage_log(io.StringIO("1,2,3\n"))
    with pytest.raises(HeaderError):
        parse_usage_log(io.StringIO(""))


def test_bad_status_and_bad_bytes():
    with pytest.raises(RowError):
        parse_usage_log(_log(_row(1, status="maybe")))
    with pytest.raises(RowError):
        parse_usage_log(_log("2024-11-04T09:00:00Z,f,p,1,xyz,0,ok"))


def test_bad_timestamp():
    with pytest.raises(RowError):
        parse_usage_log(_log("notadate,f,p,1,0,0,ok"))


def test_scan_collects_all_row_errors():
    records, errors = scan_usage_log(_log(_row(1), _row(-1), _row(2), _row(-2)))
    assert len(records) == 2
    assert [e.line for e in errors] == [3, 5]


def test_bundled_sample_parses(fixture_dir):
    records = parse_usage_log(fixture_dir / "sample-usage.csv")
    assert len(records) == 14
    assert sum(1 for r in records if r.status == "error") == 2


# --- aggregation ----------------------------------------------------------------


def test_stats_three_samples():
    stats = aggregate_stats([_record(100), _record(200), _record(300)], "f", "p")
    assert stats == LatencyStats(count=3, mean=D(200), min=D(100), max=D(300), p90=D(300))


def test_p90_nearest_rank_on_ten_samples():
    stats = aggregate_stats([_record(i) for i in range(1, 11)], "f", "p")
    assert stats.p90 == D(9)
    assert stats.count == 10


def test_no_matching_records():
    with pytest.raises(NoDataError):
        aggregate_stats([_record(1, fid="other")], "f", "p")


def test_error_records_never_influence_statistics():
    clean = [_record(100), _record(200), _record(300)]
    noisy = clean + [_record(10**6, status="error"), _record(0, status="error")]
    assert aggregate_stats(clean, "f", "p") == aggregate_stats(noisy, "f", "p")


@given(st.lists(st.integers(min_value=0, max_value=10**6), min_size=1, max_size=50), st.randoms())
def test_permutation_invariance(durations, rnd):
    records = [_record(v) for v in durations]
    shuffled = list(records)
    rnd.shuffle(shuffled)
    assert aggregate_stats(records, "f", "p") == aggregate_stats(shuffled, "f", "p")


def test_stats_match_sort_based_oracle():
    rng = random.Random(5)
    for _ in range(100):
        values = [rng.randint(0, 10**5) for _ in range(rng.randint(1, 200))]
        stats = aggregate_stats([_record(v) for v in values], "f", "p")
        ordered = sorted(values)
        rank = -((-9 * len(ordered)) // 10)
        assert stats.min == D(min(values))
        assert stats.max == D(max(values))
        assert stats.p90 == D(ordered[rank - 1])
        assert stats.mean == (
            sum(D(v) for v in values) / D(len(values))
        ).quantize(D("1e-9"))
        assert stats.min <= stats.mean <= stats.max
        assert stats.min <= stats.p90 <= stats.max


def test_summarize_groups_and_counts_errors():
    records = [
        _record(100, fid="a", pid="x"),
        _record(200, fid="a", pid="x"),
        _record(300, fid="a", pid="x", status="error"),
        _record(50, fid="b", pid="y", bytes_in=10**9),
    ]
    summaries = summarize_usage(records)
    assert set(summaries) == {("a", "x"), ("b", "y")}
    assert summaries[("a", "x")].ok_count == 2
    assert summaries[("a", "x")].error_count == 1
    assert summaries[("b", "y")].bytes_in_total == 10**9


# --- calibration ------------------------------------------------------------------


def _summary(mean, count=1, bytes_in=0, bytes_out=0):
    return UsageSummary(
        stats=LatencyStats(count=count, mean=D(mean), min=D(mean), max=D(mean), p90=D(mean)),
        ok_count=count,
        error_count=0,
        bytes_in_total=bytes_in,
        bytes_out_total=bytes_out,
    )


def _workflow():
    return WorkflowSpec(
        workflow_id="w",
        functions=(FunctionProfile(function_id="retrieval"),),
    )


def test_calibrate_sets_latency_entries():
    _, table = calibrate(_workflow(), {("retrieval", "aws-x86"): _summary("232")})
    assert table.get("retrieval", "aws-x86") == D(232)


def test_calibrate_converts_mean_bytes_to_decimal_gb():
    calibrated, _ = calibrate(
        _workflow(), {("retrieval", "aws-x86"): _summary("1", count=2, bytes_in=2 * 10**9)}
    )
    assert calibrated.functions[0].r_in == D(1)
    assert calibrated.functions[0].r_out == D(0)


def test_calibrate_reports_missing_pairs():
    with pytest.raises(CoverageError) as exc:
        calibrate(
            _workflow(),
            {("retrieval", "aws-x86"): _summary("232")},
            required_pairs=[("retrieval", "aws-x86"), ("retrieval", "gcp")],
        )
    assert exc.value.missing == (("retrieval", "gcp"),)
    assert "gcp" in str(exc.value)


def test_calibrate_leaves_unmeasured_functions_alone():
    wf = WorkflowSpec(
        workflow_id="w",
        functions=(
            FunctionProfile(function_id="a"),
            FunctionProfile(function_id="b", r_in=D("0.5")),
        ),
    )
    calibrated, _ = calibrate(wf, {("a", "x"): _summary("10", count=1, bytes_in=10**9)})
    assert calibrated.function("a").r_in == D(1)
    assert calibrated.function("b").r_in == D("0.5")
