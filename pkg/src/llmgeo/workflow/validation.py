"""Structural validation of solution graphs.

A violation never raises; each one becomes a coded entry in the returned
:class:`ValidationReport`. The checks mirror the constraints the graph
prompt imposes on the model: data/operation alternation, one weakly
connected component, acyclicity, operation degree bounds, a single
producer per data node, and convergence of every node onto an output.
"""

from __future__ import annotations

from llmgeo.workflow.model import (
    DataRole,
    Finding,
    NodeType,
    SolutionGraph,
    ValidationReport,
)

# Error codes, in the order the checks run.
EMPTY_GRAPH = "EMPTY_GRAPH"
ALTERNATION = "ALTERNATION"
DISCONNECTED = "DISCONNECTED"
CYCLE = "CYCLE"
OP_NO_INPUT = "OP_NO_INPUT"
OP_OUTPUT_COUNT = "OP_OUTPUT_COUNT"
DATA_MULTI_PRODUCER = "DATA_MULTI_PRODUCER"
NO_INPUT_DATA = "NO_INPUT_DATA"
NO_OUTPUT_DATA = "NO_OUTPUT_DATA"
UNCONVERGED = "UNCONVERGED"
# Warning code.
NO_DATA_PATH = "NO_DATA_PATH"


def role_partition(graph: SolutionGraph) -> dict[str, DataRole]:
    """Assign each data node its degree-derived role.

    In-degree 0 wins over out-degree 0, so an isolated data node counts as
    an input (and the graph then fails the output-node check rather than
    silently treating a dead end as a result).
    """
    roles: dict[str, DataRole] = {}
    for name, attrs in graph.nodes.items():
        if attrs.node_type is not NodeType.DATA:
            continue
        if graph.in_degree(name) == 0:
            roles[name] = DataRole.INPUT
        elif graph.out_degree(name) == 0:
            roles[name] = DataRole.OUTPUT
        else:
            roles[name] = DataRole.INTERMEDIATE
    return roles


def validate(graph: SolutionGraph) -> ValidationReport:
    errors: list[Finding] = []
    warnings: list[Finding] = []

    if not graph.nodes:
        return ValidationReport(
            errors=(Finding(EMPTY_GRAPH, "graph has no nodes"),),
            warnings=(),
            stats={"data": 0, "operation": 0, "input": 0, "intermediate": 0, "output": 0, "edges": 0},
        )

    roles = role_partition(graph)
    ops = graph.operation_names()

    # (a) every edge joins a data node and an operation node
    for src, dst in graph.edges:
        if graph.node_type(src) == graph.node_type(dst):
            kind = graph.node_type(src).value
            errors.append(
                Finding(ALTERNATION, f"edge joins two {kind} nodes", subject=f"{src}->{dst}")
            )

    # (b) weak connectivity, via union-find over the undirected edge set
    parent = {name: name for name in graph.nodes}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for src, dst in graph.edges:
        parent[find(src)] = find(dst)
    components: dict[str, list[str]] = {}
    for name in graph.nodes:
        components.setdefault(find(name), []).append(name)
    if len(components) > 1:
        groups = sorted(components.values(), key=len, reverse=True)
        for extra in groups[1:]:
            errors.append(
                Finding(DISCONNECTED, "nodes form a disconnected component", subject=",".join(extra))
            )

    # (c) acyclicity, via Kahn elimination
    indeg = {name: graph.in_degree(name) for name in graph.nodes}
    ready = [n for n, d in indeg.items() if d == 0]
    processed = 0
    while ready:
        node = ready.pop()
        processed += 1
        for succ in graph.successors(node):
            indeg[succ] -= 1
            if indeg[succ] == 0:
                ready.append(succ)
    if processed != len(graph.nodes):
        stuck = sorted(n for n, d in indeg.items() if d > 0)
        errors.append(Finding(CYCLE, "graph contains a cycle", subject=",".join(stuck)))

    # (d) operations consume at least one node and produce exactly one
    for op in ops:
        if graph.in_degree(op) == 0:
            errors.append(Finding(OP_NO_INPUT, "operation has no inputs", subject=op))
        if graph.out_degree(op) != 1:
            errors.append(
                Finding(OP_OUTPUT_COUNT, f"operation has out-degree {graph.out_degree(op)}, expected 1", subject=op)
            )

    # (e) at most one producer per data node
    for name in graph.data_names():
        if graph.in_degree(name) > 1:
            errors.append(
                Finding(DATA_MULTI_PRODUCER, f"data node has {graph.in_degree(name)} producers", subject=name)
            )

    # (f) the graph loads something and converges on something
    n_inputs = sum(1 for r in roles.values() if r is DataRole.INPUT)
    n_outputs = sum(1 for r in roles.values() if r is DataRole.OUTPUT)
    if n_inputs == 0:
        errors.append(Finding(NO_INPUT_DATA, "no input data node (every data node has a producer)"))
    if n_outputs == 0:
        errors.append(Finding(NO_OUTPUT_DATA, "no output data node (no consumed-then-terminal data node)"))

    # (g) every node must reach some output data node
    output_nodes = {n for n, r in roles.items() if r is DataRole.OUTPUT}
    converged: set[str] = set(output_nodes)
    # reverse breadth-first sweep from the outputs
    frontier = list(output_nodes)
    while frontier:
        node = frontier.pop()
        for pred in graph.predecessors(node):
            if pred not in converged:
                converged.add(pred)
                frontier.append(pred)
    for name in graph.nodes:
        if name not in converged:
            errors.append(Finding(UNCONVERGED, "node has no path to an output data node", subject=name))

    # inputs are expected to say where their data lives
    for name, role in roles.items():
        if role is DataRole.INPUT and not graph.nodes[name].data_path:
            warnings.append(Finding(NO_DATA_PATH, "input data node has no data_path", subject=name))

    stats = {
        "data": len(roles),
        "operation": len(ops),
        "input": n_inputs,
        "intermediate": sum(1 for r in roles.values() if r is DataRole.INTERMEDIATE),
        "output": n_outputs,
        "edges": len(graph.edges),
    }
    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings), stats=stats)
