"""Session persistence: a human-browsable directory that reloads losslessly.

Layout:

    task.txt                      the task in task-file format
    config.json                   pipeline configuration
    solution_graph.graphml        canonical serialization of the graph
    prompts/NN_<stage>[_<op>].txt one file per gateway call, in call order
    responses/NN_<stage>[_<op>].txt
    code/<op>.txt                 extracted snippet per operation
    assembly.txt
    final_program.txt
    execution_report.json
    stages.json                   per-stage status/attempts/last_error
    session.json                  id, session name, transcript metadata

Writes are deterministic: persisting the same session twice produces
byte-identical files. ``load`` rebuilds an equal :class:`Session`.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict
from pathlib import Path

from llmgeo.errors import LlmGeoError
from llmgeo.gateway.types import ChatResponse, ProviderConfig, RetryPolicy
from llmgeo.pipeline.config import (
    ErrorInfo,
    PipelineConfig,
    STAGE_NAMES,
    SUCCEEDED,
    Session,
    StageState,
    TranscriptEntry,
)
from llmgeo.prompts.render import RenderedPrompt
from llmgeo.sandbox import Artifact, ExceptionInfo, ExecutionReport
from llmgeo.taskfile import parse_task_text
from llmgeo.workflow.graphml import read_graphml, write_graphml


class SessionIOError(LlmGeoError):
    code = "IO_ERROR"


class CorruptSessionError(LlmGeoError):
    code = "CORRUPT_SESSION"


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def _dump_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def _write_text(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8", newline="")


def _read_text(path: Path) -> str:
    # newline="" on both sides: content round-trips byte-exactly
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return handle.read()


def _task_file_text(session: Session) -> str:
    lines = ["Task:"]
    lines.extend(session.task.task_text)
    lines.append("")
    lines.append("Data locations:")
    lines.extend(loc.render() for loc in session.task.data_locations)
    return "\n".join(lines) + "\n"


def _config_payload(config: PipelineConfig) -> dict:
    payload = asdict(config)
    payload["workspace_root"] = str(config.workspace_root)
    payload["cassette_dir"] = str(config.cassette_dir) if config.cassette_dir else None
    payload["shim_path"] = str(config.shim_path) if config.shim_path else None
    return payload


def _config_from_payload(payload: dict) -> PipelineConfig:
    provider_raw = payload.pop("provider")
    retries = RetryPolicy(**provider_raw.pop("retries"))
    provider = ProviderConfig(retries=retries, **provider_raw)
    payload["cassette_dir"] = Path(payload["cassette_dir"]) if payload["cassette_dir"] else None
    payload["shim_path"] = Path(payload["shim_path"]) if payload["shim_path"] else None
    payload["max_tokens"] = payload.get("max_tokens")
    return PipelineConfig(provider=provider, **payload)


def _entry_filename(index: int, entry: TranscriptEntry) -> str:
    suffix = f"_{_safe_name(entry.op_name)}" if entry.op_name else ""
    return f"{index:02d}_{entry.stage}{suffix}.txt"


def persist(session: Session) -> Path:
    """Write the session directory; returns its path."""
    root = session.directory()
    try:
        root.mkdir(parents=True, exist_ok=True)
        _write_text(root / "task.txt", _task_file_text(session))
        _dump_json(root / "config.json", _config_payload(session.config))

        if session.graph is not None:
            (root / "solution_graph.graphml").write_bytes(write_graphml(session.graph))

        prompts_dir = root / "prompts"
        responses_dir = root / "responses"
        prompts_dir.mkdir(exist_ok=True)
        responses_dir.mkdir(exist_ok=True)
        transcript_meta = []
        for i, entry in enumerate(session.transcript, start=1):
            filename = _entry_filename(i, entry)
            _write_text(prompts_dir / filename, entry.prompt.text)
            _write_text(responses_dir / filename, entry.response.content)
            transcript_meta.append(
                {
                    "file": filename,
                    "stage": entry.stage,
                    "op_name": entry.op_name,
                    "finish_reason": entry.response.finish_reason,
                    "usage": list(entry.response.usage) if entry.response.usage else None,
                }
            )

        code_dir = root / "code"
        code_dir.mkdir(exist_ok=True)
        for op, code in session.op_code.items():
            _write_text(code_dir / f"{_safe_name(op)}.txt", code)

        if session.assembly_code is not None:
            _write_text(root / "assembly.txt", session.assembly_code)
        if session.final_program is not None:
            _write_text(root / "final_program.txt", session.final_program)
        if session.execution is not None:
            _dump_json(root / "execution_report.json", asdict(session.execution))

        _dump_json(
            root / "stages.json",
            {
                name: {
                    "status": state.status,
                    "attempts": state.attempts,
                    "last_error": asdict(state.last_error) if state.last_error else None,
                }
                for name, state in session.stage_states.items()
            },
        )
        _dump_json(
            root / "session.json",
            {
                "id": session.id,
                "session_name": session.task.session_name,
                "transcript": transcript_meta,
            },
        )
    except OSError as exc:
        raise SessionIOError(f"cannot persist session to {root}: {exc}") from exc
    return root


def _load_json(root: Path, name: str) -> dict:
    path = root / name
    if not path.is_file():
        raise CorruptSessionError(f"session is missing {name}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptSessionError(f"cannot read {name}: {exc}") from exc


def load(session_dir: str | Path) -> Session:
    """Rebuild a Session from a persisted directory."""
    root = Path(session_dir)
    if not root.is_dir():
        raise CorruptSessionError(f"{root} is not a session directory")

    meta = _load_json(root, "session.json")
    stages_raw = _load_json(root, "stages.json")
    config = _config_from_payload(_load_json(root, "config.json"))

    task_path = root / "task.txt"
    if not task_path.is_file():
        raise CorruptSessionError("session is missing task.txt")
    task = parse_task_text(task_path.read_text(encoding="utf-8"), meta["session_name"])

    stage_states = {}
    for name in STAGE_NAMES:
        raw = stages_raw.get(name)
        if raw is None:
            raise CorruptSessionError(f"stages.json is missing stage {name!r}")
        error = ErrorInfo(**raw["last_error"]) if raw.get("last_error") else None
        stage_states[name] = StageState(
            status=raw["status"], attempts=raw["attempts"], last_error=error
        )

    session = Session(id=meta["id"], task=task, config=config, stage_states=stage_states)

    graph_path = root / "solution_graph.graphml"
    if stage_states["graph"].status == SUCCEEDED:
        if not graph_path.is_file():
            raise CorruptSessionError("graph stage succeeded but solution_graph.graphml is missing")
        session.graph = read_graphml(graph_path.read_bytes())
    elif graph_path.is_file():
        session.graph = read_graphml(graph_path.read_bytes())

    for item in meta.get("transcript", []):
        prompt_path = root / "prompts" / item["file"]
        response_path = root / "responses" / item["file"]
        if not prompt_path.is_file() or not response_path.is_file():
            raise CorruptSessionError(f"transcript file {item['file']} is missing")
        usage = tuple(item["usage"]) if item.get("usage") else None
        session.transcript.append(
            TranscriptEntry(
                stage=item["stage"],
                op_name=item.get("op_name"),
                prompt=RenderedPrompt(
                    stage=item["stage"], text=_read_text(prompt_path)
                ),
                response=ChatResponse(
                    content=_read_text(response_path),
                    finish_reason=item.get("finish_reason", "stop"),
                    usage=usage,
                ),
            )
        )

    if session.graph is not None:
        from llmgeo.workflow.schedule import topo_operations

        for op in topo_operations(session.graph):
            code_path = root / "code" / f"{_safe_name(op)}.txt"
            if code_path.is_file():
                session.op_code[op] = _read_text(code_path)

    assembly_path = root / "assembly.txt"
    if assembly_path.is_file():
        session.assembly_code = _read_text(assembly_path)
    final_path = root / "final_program.txt"
    if final_path.is_file():
        session.final_program = _read_text(final_path)

    report_path = root / "execution_report.json"
    if report_path.is_file():
        raw = _load_json(root, "execution_report.json")
        exception = ExceptionInfo(**raw["exception"]) if raw.get("exception") else None
        session.execution = ExecutionReport(
            status=raw["status"],
            exit_code=raw["exit_code"],
            stdout=raw["stdout"],
            stderr=raw["stderr"],
            duration_ms=raw["duration_ms"],
            artifacts=tuple(Artifact(**a) for a in raw["artifacts"]),
            exception=exception,
        )
    return session
