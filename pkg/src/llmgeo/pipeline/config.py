"""Pipeline configuration and session state."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from llmgeo.gateway.types import ChatResponse, ProviderConfig
from llmgeo.prompts.render import RenderedPrompt
from llmgeo.sandbox import ExecutionReport
from llmgeo.workflow.model import SolutionGraph, TaskSpec

STAGE_NAMES = ("graph", "operations", "assembly", "execute")

PENDING = "pending"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"


@dataclass
class PipelineConfig:
    mode: str = "replay"  # gateway mode: live | record | replay
    max_stage_attempts: int = 3
    sandbox_timeout_s: float = 300.0
    workspace_root: Path = Path("sessions")
    graphml_filename: str = "solution_graph.graphml"
    fence_tag: str = "python"
    cassette_dir: Path | None = None
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    temperature: float = 0.0
    max_tokens: int | None = None
    shim_path: Path | None = None
    no_network: bool = False

    def __post_init__(self) -> None:
        if self.max_stage_attempts < 1:
            raise ValueError("max_stage_attempts must be >= 1")
        self.workspace_root = Path(self.workspace_root)
        if self.cassette_dir is not None:
            self.cassette_dir = Path(self.cassette_dir)
        if self.shim_path is not None:
            self.shim_path = Path(self.shim_path)


@dataclass
class ErrorInfo:
    code: str
    message: str


@dataclass
class StageState:
    status: str = PENDING
    attempts: int = 0
    last_error: ErrorInfo | None = None


@dataclass
class TranscriptEntry:
    stage: str
    op_name: str | None
    prompt: RenderedPrompt
    response: ChatResponse


@dataclass
class Session:
    """One full pipeline run: inputs, per-stage state, and every artifact.

    ``transcript`` is append-only and holds every gateway exchange in call
    order; ``op_code`` keys follow topological operation order.
    """

    id: str
    task: TaskSpec
    config: PipelineConfig
    stage_states: dict[str, StageState] = field(
        default_factory=lambda: {name: StageState() for name in STAGE_NAMES}
    )
    graph: SolutionGraph | None = None
    op_code: dict[str, str] = field(default_factory=dict)
    assembly_code: str | None = None
    final_program: str | None = None
    execution: ExecutionReport | None = None
    transcript: list[TranscriptEntry] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return all(state.status == SUCCEEDED for state in self.stage_states.values())

    def directory(self) -> Path:
        return self.config.workspace_root / self.id
