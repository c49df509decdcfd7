import itertools
import random
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from cosmos.errors import (
    CycleError,
    MissingLatencyError,
    SchemaError,
    UnknownFunctionError,
    UnplacedFunctionError,
)
from cosmos.workflow import (
    FunctionProfile,
    LatencyTable,
    Placement,
    WorkflowSpec,
    load_workflow,
    load_workflow_document,
    workflow_latency,
)


def _wf_doc(functions, edges):
    return {
        "workflow_id": "t",
        "functions": [{"function_id": f} for f in functions],
        "edges": edges,
    }


def _chain(fids):
    return WorkflowSpec(
        workflow_id="chain",
        functions=tuple(FunctionProfile(function_id=f) for f in fids),
        edges=tuple(zip(fids, fids[1:])),
    )


# --- loading ----------------------------------------------------------------


def test_bundled_pipeline_shape(pipeline):
    wf, latencies = pipeline
    assert len(wf.functions) == 3
    assert len(wf.edges) == 2
    assert wf.function_ids == ("data-retrieval", "data-processing", "ai-inference")
    assert latencies is not None


def test_latency_factors_expand_from_reference(pipeline):
    _, latencies = pipeline
    assert latencies.get("data-retrieval", "aws-lambda-edge") == Decimal("125.28")
    assert latencies.get("data-processing", "aws-lambda-edge") == Decimal("88.56")
    assert latencies.get("ai-inference", "aws-lambda-edge") == Decimal("45.36")


def test_explicit_latency_entries_override_factors():
    doc = {
        "workflow_id": "t",
        "functions": [{"function_id": "a"}],
        "latency": {
            "reference_platform": "base",
            "entries": {"a": {"base": "100", "fast": "37"}},
            "factors": {"fast": "0.5"},
        },
    }
    _, latencies = load_workflow_document(doc)
    assert latencies.get("a", "fast") == Decimal("37")


def test_single_function_no_edges_is_valid():
    wf = load_workflow(_wf_doc(["only"], []))
    assert wf.function_ids == ("only",)


def test_two_cycle_rejected():
    with pytest.raises(CycleError):
        load_workflow(_wf_doc(["a", "b"], [["a", "b"], ["b", "a"]]))


def test_self_loop_rejected():
    with pytest.raises(CycleError):
        load_workflow(_wf_doc(["a"], [["a", "a"]]))


def test_dangling_edge_rejected():
    with pytest.raises(UnknownFunctionError):
        load_workflow(_wf_doc(["a"], [["a", "ghost"]]))


def test_duplicate_function_ids_rejected():
    with pytest.raises(SchemaError):
        load_workflow(_wf_doc(["a", "a"], []))


def test_negative_quantity_rejected():
    doc = _wf_doc(["a"], [])
    doc["functions"][0]["n"] = "-1"
    with pytest.raises(SchemaError):
        load_workflow(doc)


def test_float_quantity_rejected():
    doc = _wf_doc(["a"], [])
    doc["functions"][0]["t"] = 0.1
    with pytest.raises(SchemaError):
        load_workflow(doc)


def test_unknown_function_field_rejected():
    doc = _wf_doc(["a"], [])
    doc["functions"][0]["memory"] = "1"
    with pytest.raises(SchemaError):
        load_workflow(doc)


# --- latency aggregation ------------------------------------------------------


def test_chain_latency_sums_hand_added_values():
    wf = _chain(["r", "p", "i"])
    placement = Placement.uniform(wf, "x86")
    latencies = LatencyTable(
        {("r", "x86"): Decimal(232), ("p", "x86"): Decimal(164), ("i", "x86"): Decimal(84)}
    )
    assert workflow_latency(wf, placement, latencies) == Decimal(480)


def test_single_function_latency():
    wf = _chain(["r"])
    latencies = LatencyTable({("r", "gcp"): Decimal(215)})
    assert workflow_latency(wf, Placement.uniform(wf, "gcp"), latencies) == Decimal(215)


def test_parallel_branches_use_critical_path():
    wf = WorkflowSpec(
        workflow_id="par",
        functions=(FunctionProfile(function_id="a"), FunctionProfile(function_id="b")),
        edges=(),
    )
    latencies = LatencyTable({("a", "p"): Decimal(100), ("b", "p"): Decimal(300)})
    assert workflow_latency(wf, Placement.uniform(wf, "p"), latencies) == Decimal(300)


def test_missing_latency_entry_names_pair():
    wf = _chain(["r"])
    with pytest.raises(MissingLatencyError) as exc:
        workflow_latency(wf, Placement.uniform(wf, "gcp"), LatencyTable({}))
    assert exc.value.function_id == "r"
    assert exc.value.platform_id == "gcp"


@given(st.lists(st.integers(min_value=0, max_value=10**6), min_size=1, max_size=12))
def test_chain_latency_equals_sum(values):
    fids = [f"f{i}" for i in range(len(values))]
    wf = _chain(fids)
    latencies = LatencyTable({(fid, "p"): Decimal(v) for fid, v in zip(fids, values)})
    assert workflow_latency(wf, Placement.uniform(wf, "p"), latencies) == sum(
        (Decimal(v) for v in values), Decimal(0)
    )


def _brute_force_critical_path(n_nodes, edges, weights):
    """Oracle: enumerate every path and take the heaviest."""
    succs = {i: [j for (a, j) in edges if a == i] for i in range(n_nodes)}
    best = Decimal(0)

    def walk(node, acc):
        nonlocal best
        acc = acc + weights[node]
        if not succs[node]:
            best = max(best, acc)
        for nxt in succs[node]:
            walk(nxt, acc)

    for start in range(n_nodes):
        if not any(dst == start for _, dst in edges):
            walk(start, Decimal(0))
    return best


@given(st.data())
def test_dag_latency_matches_path_enumeration(data):
    n = data.draw(st.integers(min_value=1, max_value=8))
    # Upper-triangular adjacency keeps the graph acyclic by construction.
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if data.draw(st.booleans(), label=f"edge{i}-{j}")
    ]
    weights = {i: Decimal(data.draw(st.integers(0, 1000), label=f"w{i}")) for i in range(n)}
    fids = [f"f{i}" for i in range(n)]
    wf = WorkflowSpec(
        workflow_id="g",
        functions=tuple(FunctionProfile(function_id=f) for f in fids),
        edges=tuple((fids[a], fids[b]) for a, b in edges),
    )
    latencies = LatencyTable({(fids[i], "p"): weights[i] for i in range(n)})
    got = workflow_latency(wf, Placement.uniform(wf, "p"), latencies)
    assert got == _brute_force_critical_path(n, edges, weights)


def test_zero_latency_function_never_changes_result():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 7)
        fids = [f"f{i}" for i in range(n)]
        edges = [
            (fids[i], fids[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < 0.4
        ]
        weights = {fid: Decimal(rng.randint(0, 500)) for fid in fids}
        wf = WorkflowSpec(
            workflow_id="g",
            functions=tuple(FunctionProfile(function_id=f) for f in fids),
            edges=tuple(edges),
        )
        latencies = LatencyTable({(fid, "p"): weights[fid] for fid in fids})
        base = workflow_latency(wf, Placement.uniform(wf, "p"), latencies)

        # Splice a zero-weight function onto an arbitrary attachment point.
        anchor = rng.choice(fids)
        wf2 = WorkflowSpec(
            workflow_id="g2",
            functions=wf.functions + (FunctionProfile(function_id="zero"),),
            edges=wf.edges + ((anchor, "zero"),),
        )
        latencies2 = LatencyTable({**dict(latencies.entries), ("zero", "p"): Decimal(0)})
        assert workflow_latency(wf2, Placement.uniform(wf2, "p"), latencies2) == base


def test_placement_helpers():
    wf = _chain(["a", "b"])
    placement = Placement.of({"a": "x", "b": "y"})
    assert placement.platform_for("a") == "x"
    with pytest.raises(UnplacedFunctionError):
        placement.platform_for("ghost")
    assert str(placement) == "a=x,b=y"
