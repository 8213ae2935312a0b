"""Data model for the solution graph: a directed acyclic workflow whose nodes
alternate between data and operations.

All types are plain value objects; construction enforces the structural
invariants that are cheap and local (edge endpoints exist, no duplicate
edges, operation nodes carry no data path). Rule-level checks such as
alternation, connectivity and convergence live in :mod:`llmgeo.workflow.validation`.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from llmgeo.errors import LlmGeoError

_SESSION_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class WorkflowError(LlmGeoError):
    code = "WORKFLOW_ERROR"


class InvalidGraphError(WorkflowError):
    """Operation was called on a graph that does not pass validation."""

    code = "INVALID_GRAPH"

    def __init__(self, message: str, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.report = report


class NotAnOperationError(WorkflowError):
    code = "NOT_AN_OPERATION"


class MultiOutputError(WorkflowError):
    code = "MULTI_OUTPUT"


class NodeType(str, enum.Enum):
    DATA = "data"
    OPERATION = "operation"


class DataRole(str, enum.Enum):
    """Role of a data node, derived from degrees and never stored.

    A data node with in-degree 0 is an input; otherwise, out-degree 0 makes
    it an output; anything else is intermediate.
    """

    INPUT = "input"
    INTERMEDIATE = "intermediate"
    OUTPUT = "output"


@dataclass(frozen=True)
class DataLocation:
    """One numbered entry of a task's data-location list.

    ``notes`` holds the entry text exactly as the user supplied it (the URI
    plus column names, formats, projections); ``uri`` is the extracted
    load location so tooling can inspect it without re-parsing prose.
    """

    index: int
    uri: str
    notes: str

    def __post_init__(self) -> None:
        if not self.uri:
            raise ValueError("data location uri must be non-empty")

    def render(self) -> str:
        return f"{self.index}. {self.notes}"


@dataclass(frozen=True)
class TaskSpec:
    """A user task: objective lines plus enumerated data locations."""

    session_name: str
    task_text: tuple[str, ...]
    data_locations: tuple[DataLocation, ...] = ()

    def __post_init__(self) -> None:
        if not any(line.strip() for line in self.task_text):
            raise ValueError("task_text needs at least one non-empty line")
        if not _SESSION_NAME_RE.match(self.session_name):
            raise ValueError(f"session_name {self.session_name!r} is not directory-safe")
        for pos, loc in enumerate(self.data_locations, start=1):
            if loc.index != pos:
                raise ValueError(f"data location indices must run 1..n, got {loc.index} at position {pos}")

    def task_block(self) -> str:
        return "\n".join(self.task_text)

    def data_locations_block(self) -> str:
        return "\n".join(loc.render() for loc in self.data_locations)


@dataclass(frozen=True)
class NodeAttrs:
    """Attributes of one solution-graph node."""

    node_type: NodeType
    description: str = ""
    data_path: str = ""

    def __post_init__(self) -> None:
        if self.node_type is NodeType.OPERATION and self.data_path:
            raise ValueError("operation nodes must have an empty data_path")


@dataclass
class SolutionGraph:
    """Directed graph of named data and operation nodes.

    Node order is the insertion order of ``nodes``; edge order is the order
    of ``edges``. Both orders are preserved by serialization. Instances are
    treated as immutable after construction.
    """

    nodes: dict[str, NodeAttrs]
    edges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen: set[tuple[str, str]] = set()
        for src, dst in self.edges:
            if src not in self.nodes:
                raise ValueError(f"edge source {src!r} is not a node")
            if dst not in self.nodes:
                raise ValueError(f"edge target {dst!r} is not a node")
            if (src, dst) in seen:
                raise ValueError(f"duplicate edge {src!r} -> {dst!r}")
            seen.add((src, dst))

    def node_type(self, name: str) -> NodeType:
        return self.nodes[name].node_type

    def is_operation(self, name: str) -> bool:
        return self.nodes[name].node_type is NodeType.OPERATION

    def is_data(self, name: str) -> bool:
        return self.nodes[name].node_type is NodeType.DATA

    def operation_names(self) -> list[str]:
        return [n for n, a in self.nodes.items() if a.node_type is NodeType.OPERATION]

    def data_names(self) -> list[str]:
        return [n for n, a in self.nodes.items() if a.node_type is NodeType.DATA]

    def predecessors(self, name: str) -> list[str]:
        return [src for src, dst in self.edges if dst == name]

    def successors(self, name: str) -> list[str]:
        return [dst for src, dst in self.edges if src == name]

    def in_degree(self, name: str) -> int:
        return sum(1 for _, dst in self.edges if dst == name)

    def out_degree(self, name: str) -> int:
        return sum(1 for src, _ in self.edges if src == name)


@dataclass(frozen=True)
class OperationSignature:
    """Call surface of one operation, derived from its graph neighborhood.

    ``params`` are the operation's in-neighbor data nodes in lexicographic
    (byte) order; ``return_name`` is its unique out-neighbor data node.
    The rendered fields are pure functions of the other fields.
    """

    name: str
    params: tuple[str, ...]
    return_name: str
    description: str

    @property
    def function_definition(self) -> str:
        args = ", ".join(f"{p}={p}" for p in self.params)
        return f"{self.name}({args})"

    @property
    def return_line(self) -> str:
        return f"return {self.return_name}"


@dataclass(frozen=True)
class Finding:
    """One coded validation finding, pointing at a node or an edge."""

    code: str
    message: str
    subject: str = ""


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Finding, ...]
    warnings: tuple[Finding, ...]
    stats: dict[str, int] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.errors

    def error_codes(self) -> set[str]:
        return {f.code for f in self.errors}

    def summary(self) -> str:
        lines = [f"{len(self.errors)} errors, {len(self.warnings)} warnings"]
        for f in self.errors:
            lines.append(f"  error {f.code}: {f.message}" + (f" [{f.subject}]" if f.subject else ""))
        for f in self.warnings:
            lines.append(f"  warning {f.code}: {f.message}" + (f" [{f.subject}]" if f.subject else ""))
        if self.stats:
            lines.append("  stats: " + ", ".join(f"{k}={v}" for k, v in self.stats.items()))
        return "\n".join(lines)
