"""Stage machine, session state, and session persistence."""

from llmgeo.pipeline.config import (
    FAILED,
    PENDING,
    RUNNING,
    STAGE_NAMES,
    SUCCEEDED,
    ErrorInfo,
    PipelineConfig,
    Session,
    StageState,
    TranscriptEntry,
)
from llmgeo.pipeline.persist import CorruptSessionError, SessionIOError, load, persist
from llmgeo.pipeline.runner import (
    GraphInvalidError,
    GraphMLMissingError,
    OperationFailedError,
    PipelineError,
    SandboxFailureError,
    StageTimeoutError,
    build_gateway,
    compose_final_program,
    new_session_id,
    run,
    stage_assembly,
    stage_execute,
    stage_operations,
    stage_solution_graph,
)

__all__ = [
    "CorruptSessionError",
    "ErrorInfo",
    "FAILED",
    "GraphInvalidError",
    "GraphMLMissingError",
    "OperationFailedError",
    "PENDING",
    "PipelineConfig",
    "PipelineError",
    "RUNNING",
    "STAGE_NAMES",
    "SUCCEEDED",
    "SandboxFailureError",
    "Session",
    "SessionIOError",
    "StageState",
    "StageTimeoutError",
    "TranscriptEntry",
    "build_gateway",
    "compose_final_program",
    "load",
    "new_session_id",
    "persist",
    "run",
    "stage_assembly",
    "stage_execute",
    "stage_operations",
    "stage_solution_graph",
]
