"""Scheduling and signature derivation over a validated solution graph.

Operation order is deterministic: Kahn's algorithm with a heap of ready
operations, so simultaneously-ready operations come out in lexicographic
name order. Prompts built from this order are reproducible byte-for-byte.
"""

from __future__ import annotations

import heapq

from llmgeo.workflow.model import (
    DataRole,
    InvalidGraphError,
    MultiOutputError,
    NotAnOperationError,
    OperationSignature,
    SolutionGraph,
)
from llmgeo.workflow.validation import role_partition, validate


def _require_valid(graph: SolutionGraph) -> None:
    report = validate(graph)
    if not report.valid:
        raise InvalidGraphError(
            f"graph fails validation with {len(report.errors)} errors", report=report
        )


def _require_operation(graph: SolutionGraph, op: str) -> None:
    if op not in graph.nodes or not graph.is_operation(op):
        raise NotAnOperationError(f"{op!r} is not an operation node")


def data_roles(graph: SolutionGraph) -> dict[str, DataRole]:
    """Map every data node to input/intermediate/output; operations are absent."""
    _require_valid(graph)
    return role_partition(graph)


def _producer(graph: SolutionGraph, data_node: str) -> str | None:
    preds = graph.predecessors(data_node)
    return preds[0] if preds else None


def _op_dependencies(graph: SolutionGraph) -> dict[str, set[str]]:
    """Operation -> operations that must run first (producers of its inputs)."""
    deps: dict[str, set[str]] = {op: set() for op in graph.operation_names()}
    for op in deps:
        for data_in in graph.predecessors(op):
            producer = _producer(graph, data_in)
            if producer is not None:
                deps[op].add(producer)
    return deps


def topo_operations(graph: SolutionGraph) -> list[str]:
    """All operations in execution order, ancestors first, ties lexicographic."""
    _require_valid(graph)
    deps = _op_dependencies(graph)
    remaining = {op: len(d) for op, d in deps.items()}
    dependents: dict[str, list[str]] = {op: [] for op in deps}
    for op, d in deps.items():
        for dep in d:
            dependents[dep].append(op)

    ready = [op for op, count in remaining.items() if count == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        op = heapq.heappop(ready)
        order.append(op)
        for dependent in dependents[op]:
            remaining[dependent] -= 1
            if remaining[dependent] == 0:
                heapq.heappush(ready, dependent)
    return order


def derive_signature(graph: SolutionGraph, op: str) -> OperationSignature:
    """Function name, keyword parameters and return variable for one operation."""
    _require_operation(graph, op)
    outputs = graph.successors(op)
    if len(outputs) != 1:
        raise MultiOutputError(f"operation {op!r} has out-degree {len(outputs)}, expected 1")
    return OperationSignature(
        name=op,
        params=tuple(sorted(graph.predecessors(op))),
        return_name=outputs[0],
        description=graph.nodes[op].description,
    )


def _reachable_operations(graph: SolutionGraph, start: str, *, forward: bool) -> set[str]:
    step = graph.successors if forward else graph.predecessors
    seen: set[str] = set()
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in step(node):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return {n for n in seen if graph.is_operation(n)}


def ancestor_operations(graph: SolutionGraph, op: str) -> list[str]:
    """Operations with a directed path into ``op``, in topological order."""
    _require_operation(graph, op)
    ancestors = _reachable_operations(graph, op, forward=False)
    return [name for name in topo_operations(graph) if name in ancestors]


def descendant_operations(graph: SolutionGraph, op: str) -> list[OperationSignature]:
    """Signatures of operations reachable from ``op``, in topological order."""
    _require_operation(graph, op)
    descendants = _reachable_operations(graph, op, forward=True)
    order = [name for name in topo_operations(graph) if name in descendants]
    return [derive_signature(graph, name) for name in order]
