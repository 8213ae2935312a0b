"""The stage machine: solution graph -> per-operation code -> assembly -> execution.

Stages run strictly in order; a later stage never starts unless every
earlier one succeeded. LLM-facing stages retry with the same prompt up to
``max_stage_attempts`` (per operation in the operations stage); execution
runs once. The session, including all partial results and the full
transcript, is persisted whether the run succeeds or stops early.
"""

from __future__ import annotations

import secrets
import time

from llmgeo.errors import LlmGeoError
from llmgeo.gateway.client import CassetteStore, Gateway, user_request
from llmgeo.gateway.extract import extract_fenced_code
from llmgeo.gateway.types import GatewayError
from llmgeo.pipeline.config import (
    FAILED,
    RUNNING,
    STAGE_NAMES,
    SUCCEEDED,
    ErrorInfo,
    PipelineConfig,
    Session,
    TranscriptEntry,
)
from llmgeo.pipeline.persist import persist
from llmgeo.prompts.guidance import ALL_CATEGORIES, select_guidance
from llmgeo.prompts.render import (
    OperationContext,
    RenderedPrompt,
    render_assembly_prompt,
    render_graph_prompt,
    render_operation_prompt,
)
from llmgeo.sandbox import ExecRequest, create_workspace, execute
from llmgeo.workflow.graphml import read_graphml
from llmgeo.workflow.model import SolutionGraph, TaskSpec
from llmgeo.workflow.schedule import (
    ancestor_operations,
    derive_signature,
    descendant_operations,
    topo_operations,
)
from llmgeo.workflow.validation import validate


class PipelineError(LlmGeoError):
    code = "PIPELINE_ERROR"


class SandboxFailureError(PipelineError):
    code = "SANDBOX_FAILURE"


class StageTimeoutError(PipelineError):
    code = "TIMEOUT"


class GraphMLMissingError(PipelineError):
    code = "GRAPHML_MISSING"


class GraphInvalidError(PipelineError):
    code = "GRAPH_INVALID"

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class OperationFailedError(PipelineError):
    """Wraps a per-operation failure, keeping the underlying error code."""

    def __init__(self, op: str, cause: LlmGeoError):
        super().__init__(f"operation {op!r} failed: {cause}")
        self.code = cause.code
        self.op = op


def new_session_id(session_name: str) -> str:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    return f"{session_name}-{stamp}-{secrets.token_hex(3)}"


def build_gateway(config: PipelineConfig, provider=None) -> Gateway:
    store = CassetteStore(config.cassette_dir) if config.cassette_dir is not None else None
    return Gateway(provider_config=config.provider, cassette_store=store, provider=provider)


def _complete(
    session: Session,
    gateway: Gateway,
    stage_tag: str,
    op_name: str | None,
    prompt: RenderedPrompt,
):
    request = user_request(
        prompt.text,
        model=session.config.provider.model,
        stage_tag=stage_tag,
        temperature=session.config.temperature,
        max_tokens=session.config.max_tokens,
    )
    response = gateway.complete(request, session.config.mode)
    session.transcript.append(
        TranscriptEntry(stage=stage_tag, op_name=op_name, prompt=prompt, response=response)
    )
    return response


def _run_snippet(session: Session, exec_name: str, filename: str, code: str):
    ws = create_workspace(session.directory() / "exec", exec_name)
    (ws.root / filename).write_text(code, encoding="utf-8", newline="\n")
    report = execute(
        ws,
        ExecRequest(
            snippet_path=filename,
            timeout_s=session.config.sandbox_timeout_s,
            no_network=session.config.no_network,
        ),
        shim_path=session.config.shim_path,
    )
    return ws, report


def stage_solution_graph(session: Session, gateway: Gateway, attempt: int = 1) -> SolutionGraph:
    """One attempt: prompt -> code -> sandboxed run -> GraphML -> validation."""
    config = session.config
    prompt = render_graph_prompt(session.task, config.graphml_filename)
    response = _complete(session, gateway, "graph", None, prompt)
    snippet = extract_fenced_code(response.content, config.fence_tag)

    ws, report = _run_snippet(session, f"graph-{attempt:02d}", "graph_snippet.py", snippet.text)
    if report.status != "success":
        detail = report.exception.traceback if report.exception else report.stderr
        raise SandboxFailureError(
            f"graph snippet run ended with status {report.status}: {detail.strip()[-1000:]}"
        )

    graphml_file = ws.root / config.graphml_filename
    if not graphml_file.is_file():
        raise GraphMLMissingError(
            f"graph snippet ran but wrote no {config.graphml_filename!r}"
        )
    graph = read_graphml(graphml_file.read_bytes())
    vreport = validate(graph)
    if not vreport.valid:
        raise GraphInvalidError(
            "generated graph failed validation:\n" + vreport.summary(), report=vreport
        )
    session.graph = graph
    return graph


def stage_operations(session: Session, gateway: Gateway) -> dict[str, str]:
    """Generate code for every operation in topological order."""
    config = session.config
    graph = session.graph
    assert graph is not None
    guidance = select_guidance(ALL_CATEGORIES)

    for op in topo_operations(graph):
        signature = derive_signature(graph, op)
        ancestors = ancestor_operations(graph, op)
        ctx = OperationContext(
            signature=signature,
            ancestor_code=tuple((name, session.op_code[name]) for name in ancestors),
            descendant_defs=tuple(
                (sig.name, sig.description, sig.function_definition, sig.return_line)
                for sig in descendant_operations(graph, op)
            ),
        )
        prompt = render_operation_prompt(session.task, ctx, guidance)
        last: LlmGeoError | None = None
        for _ in range(config.max_stage_attempts):
            try:
                response = _complete(session, gateway, "operation", op, prompt)
                snippet = extract_fenced_code(response.content, config.fence_tag)
                session.op_code[op] = snippet.text
                last = None
                break
            except LlmGeoError as exc:
                last = exc
        if last is not None:
            raise OperationFailedError(op, last)
    return session.op_code


def compose_final_program(op_code: dict[str, str], assembly_code: str) -> str:
    units = [code.rstrip("\n") for code in op_code.values()]
    units.append(assembly_code.rstrip("\n"))
    return "\n\n\n".join(units) + "\n"


def stage_assembly(session: Session, gateway: Gateway) -> str:
    """One attempt: assembly prompt -> main-block snippet -> final program."""
    config = session.config
    snippets = [(op, code) for op, code in session.op_code.items()]
    prompt = render_assembly_prompt(session.task, snippets)
    response = _complete(session, gateway, "assembly", None, prompt)
    snippet = extract_fenced_code(response.content, config.fence_tag)
    session.assembly_code = snippet.text
    session.final_program = compose_final_program(session.op_code, snippet.text)
    return session.final_program


def stage_execute(session: Session):
    """Run the final program in a fresh workspace and attach the report."""
    assert session.final_program is not None
    _, report = _run_snippet(session, "final-01", "final_program.py", session.final_program)
    session.execution = report
    if report.status == "timeout":
        raise StageTimeoutError(
            f"final program exceeded {session.config.sandbox_timeout_s}s"
        )
    if report.status != "success":
        detail = report.exception.traceback if report.exception else report.stderr
        raise SandboxFailureError(
            f"final program ended with status {report.status}: {detail.strip()[-1000:]}"
        )
    return report


def _attempt_loop(session: Session, stage: str, max_attempts: int, fn) -> bool:
    state = session.stage_states[stage]
    state.status = RUNNING
    for attempt in range(1, max_attempts + 1):
        state.attempts = attempt
        try:
            fn(attempt)
            state.status = SUCCEEDED
            state.last_error = None
            return True
        except LlmGeoError as exc:
            state.last_error = ErrorInfo(code=exc.code, message=str(exc))
    state.status = FAILED
    return False


def run(
    task: TaskSpec,
    config: PipelineConfig,
    *,
    session_id: str | None = None,
    gateway: Gateway | None = None,
) -> Session:
    """Execute the full pipeline; never raises for stage failures.

    The returned session holds the final stage states, the transcript, and
    whatever each stage produced before the run stopped. The session
    directory is persisted in all cases.
    """
    session = Session(
        id=session_id or new_session_id(task.session_name),
        task=task,
        config=config,
    )
    create_workspace(config.workspace_root, session.id)
    gw = gateway or build_gateway(config)

    try:
        gw.check_ready(config.mode)
    except GatewayError as exc:
        state = session.stage_states["graph"]
        state.status = FAILED
        state.last_error = ErrorInfo(code=exc.code, message=str(exc))
        persist(session)
        return session

    steps = {
        "graph": lambda attempt: stage_solution_graph(session, gw, attempt),
        "operations": lambda attempt: stage_operations(session, gw),
        "assembly": lambda attempt: stage_assembly(session, gw),
        "execute": lambda attempt: stage_execute(session),
    }
    # operations retries per operation internally; execution is not retried
    stage_attempts = {
        "graph": config.max_stage_attempts,
        "operations": 1,
        "assembly": config.max_stage_attempts,
        "execute": 1,
    }
    for stage in STAGE_NAMES:
        if not _attempt_loop(session, stage, stage_attempts[stage], steps[stage]):
            break
    persist(session)
    return session
