"""Brute-force reference checker for solution-graph validation.

Deliberately naive and written against different algorithms than the
validator: adjacency-matrix transitive closure (Warshall) for cycles and
convergence, plain undirected flood fill for connectivity. Verdicts are
compared as sets of violated rule codes.
"""

from __future__ import annotations

from llmgeo.workflow.model import NodeType, SolutionGraph


def oracle_codes(graph: SolutionGraph) -> set[str]:
    if not graph.nodes:
        return {"EMPTY_GRAPH"}

    names = list(graph.nodes)
    idx = {name: i for i, name in enumerate(names)}
    n = len(names)
    codes: set[str] = set()

    # per-edge type check
    for src, dst in graph.edges:
        if graph.nodes[src].node_type == graph.nodes[dst].node_type:
            codes.add("ALTERNATION")

    # undirected flood fill
    undirected: dict[str, set[str]] = {name: set() for name in names}
    for src, dst in graph.edges:
        undirected[src].add(dst)
        undirected[dst].add(src)
    seen = {names[0]}
    stack = [names[0]]
    while stack:
        node = stack.pop()
        for other in undirected[node]:
            if other not in seen:
                seen.add(other)
                stack.append(other)
    if len(seen) != n:
        codes.add("DISCONNECTED")

    # transitive closure over the directed edges
    reach = [[False] * n for _ in range(n)]
    for src, dst in graph.edges:
        reach[idx[src]][idx[dst]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    if any(reach[i][i] for i in range(n)):
        codes.add("CYCLE")

    indeg = {name: 0 for name in names}
    outdeg = {name: 0 for name in names}
    for src, dst in graph.edges:
        outdeg[src] += 1
        indeg[dst] += 1

    for name in names:
        if graph.nodes[name].node_type is NodeType.OPERATION:
            if indeg[name] == 0:
                codes.add("OP_NO_INPUT")
            if outdeg[name] != 1:
                codes.add("OP_OUTPUT_COUNT")
        else:
            if indeg[name] > 1:
                codes.add("DATA_MULTI_PRODUCER")

    data = [name for name in names if graph.nodes[name].node_type is NodeType.DATA]
    inputs = [name for name in data if indeg[name] == 0]
    outputs = [name for name in data if outdeg[name] == 0 and indeg[name] >= 1]
    if not inputs:
        codes.add("NO_INPUT_DATA")
    if not outputs:
        codes.add("NO_OUTPUT_DATA")

    output_idx = [idx[name] for name in outputs]
    for name in names:
        i = idx[name]
        if name in outputs:
            continue
        if not any(reach[i][j] for j in output_idx):
            codes.add("UNCONVERGED")

    return codes
