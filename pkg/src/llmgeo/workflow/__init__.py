"""Solution-graph IR: model, validation, scheduling, GraphML persistence."""

from llmgeo.workflow.graphml import (
    GraphMLParseError,
    GraphMLSchemaError,
    read_graphml,
    write_graphml,
)
from llmgeo.workflow.model import (
    DataLocation,
    DataRole,
    Finding,
    InvalidGraphError,
    MultiOutputError,
    NodeAttrs,
    NodeType,
    NotAnOperationError,
    OperationSignature,
    SolutionGraph,
    TaskSpec,
    ValidationReport,
    WorkflowError,
)
from llmgeo.workflow.schedule import (
    ancestor_operations,
    data_roles,
    derive_signature,
    descendant_operations,
    topo_operations,
)
from llmgeo.workflow.validation import validate

__all__ = [
    "DataLocation",
    "DataRole",
    "Finding",
    "GraphMLParseError",
    "GraphMLSchemaError",
    "InvalidGraphError",
    "MultiOutputError",
    "NodeAttrs",
    "NodeType",
    "NotAnOperationError",
    "OperationSignature",
    "SolutionGraph",
    "TaskSpec",
    "ValidationReport",
    "WorkflowError",
    "ancestor_operations",
    "data_roles",
    "derive_signature",
    "descendant_operations",
    "read_graphml",
    "topo_operations",
    "validate",
    "write_graphml",
]
