import pytest

from llmgeo.workflow.model import (
    DataLocation,
    NodeAttrs,
    NodeType,
    OperationSignature,
    SolutionGraph,
    TaskSpec,
)


def test_task_spec_rejects_empty_task():
    with pytest.raises(ValueError):
        TaskSpec(session_name="ok", task_text=("", "  "))


@pytest.mark.parametrize("name", ["", "a b", "x/y", "über"])
def test_task_spec_rejects_unsafe_session_names(name):
    with pytest.raises(ValueError):
        TaskSpec(session_name=name, task_text=("do something",))


def test_task_spec_requires_consecutive_location_indices():
    locs = (
        DataLocation(index=1, uri="https://a", notes="a"),
        DataLocation(index=3, uri="https://b", notes="b"),
    )
    with pytest.raises(ValueError):
        TaskSpec(session_name="s", task_text=("t",), data_locations=locs)


def test_data_location_requires_uri():
    with pytest.raises(ValueError):
        DataLocation(index=1, uri="", notes="something")


def test_operation_nodes_cannot_carry_a_data_path():
    with pytest.raises(ValueError):
        NodeAttrs(node_type=NodeType.OPERATION, data_path="/tmp/x")


def test_graph_rejects_edges_to_missing_nodes():
    nodes = {"a": NodeAttrs(node_type=NodeType.DATA)}
    with pytest.raises(ValueError):
        SolutionGraph(nodes=nodes, edges=[("a", "ghost")])


def test_graph_rejects_duplicate_edges():
    nodes = {
        "a": NodeAttrs(node_type=NodeType.DATA),
        "f": NodeAttrs(node_type=NodeType.OPERATION),
    }
    with pytest.raises(ValueError):
        SolutionGraph(nodes=nodes, edges=[("a", "f"), ("a", "f")])


def test_signature_renders_keyword_call_and_return_line():
    sig = OperationSignature(
        name="f", params=("a", "b"), return_name="out", description="combine"
    )
    assert sig.function_definition == "f(a=a, b=b)"
    assert sig.return_line == "return out"


def test_graph_degree_helpers(case1_graph):
    assert case1_graph.in_degree("join_tract_pop") == 2
    assert case1_graph.out_degree("join_tract_pop") == 1
    assert sorted(case1_graph.predecessors("join_tract_pop")) == [
        "nc_tract_gdf",
        "nc_tract_pop_df",
    ]
    assert case1_graph.successors("generate_map") == ["population_map"]
