"""Operator command line.

Commands::

    llmgeo run --task-file F [--mode live|record|replay] ...
    llmgeo replay --task-file F --cassettes DIR ...      (run --mode replay)
    llmgeo record --task-file F --cassettes DIR ...      (run --mode record)
    llmgeo validate-graph GRAPH.graphml
    llmgeo render-prompts --task-file F --graph GRAPH.graphml [--out DIR]
    llmgeo eval --case case1 --trials N [--mode M] [--parallel]
    llmgeo show-session DIR

Every command accepts ``--json`` for machine-readable output and
``--config FILE`` (JSON, same keys as the flags; flags win). Exit codes:
0 success, 1 pipeline or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from llmgeo.casebook.cases import load_case
from llmgeo.casebook.trials import run_trials
from llmgeo.errors import LlmGeoError
from llmgeo.gateway.types import ProviderConfig
from llmgeo.pipeline.config import PipelineConfig, Session
from llmgeo.pipeline.persist import load as load_session
from llmgeo.pipeline.runner import run as run_pipeline
from llmgeo.prompts.guidance import ALL_CATEGORIES, select_guidance
from llmgeo.prompts.render import (
    OperationContext,
    render_assembly_prompt,
    render_graph_prompt,
    render_operation_prompt,
)
from llmgeo.taskfile import parse_task_file
from llmgeo.workflow.graphml import read_graphml
from llmgeo.workflow.schedule import (
    ancestor_operations,
    derive_signature,
    descendant_operations,
    topo_operations,
)
from llmgeo.workflow.validation import validate

_CONFIG_KEYS = ("mode", "cassettes", "workspace", "model", "temperature", "timeout", "trials")


def _fail(message: str, code: int = 1) -> int:
    print(message, file=sys.stderr)
    return code


def _merged(args: argparse.Namespace) -> dict:
    """File config (if any) overlaid by explicitly-passed flags."""
    settings: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            settings.update(json.loads(Path(config_path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise LlmGeoError(f"cannot read config file {config_path}: {exc}")
    for key in _CONFIG_KEYS:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            settings[key] = value
    return settings


def _pipeline_config(args: argparse.Namespace, mode: str) -> PipelineConfig:
    settings = _merged(args)
    provider = ProviderConfig(model=settings.get("model", ProviderConfig().model))
    return PipelineConfig(
        mode=mode,
        workspace_root=Path(settings.get("workspace", "sessions")),
        cassette_dir=Path(settings["cassettes"]) if settings.get("cassettes") else None,
        provider=provider,
        temperature=float(settings.get("temperature", 0.0)),
        sandbox_timeout_s=float(settings.get("timeout", 300.0)),
    )


def _session_summary(session: Session) -> dict:
    summary = {
        "session_id": session.id,
        "directory": str(session.directory()),
        "succeeded": session.succeeded,
        "stages": {
            name: {
                "status": state.status,
                "attempts": state.attempts,
                "error": asdict(state.last_error) if state.last_error else None,
            }
            for name, state in session.stage_states.items()
        },
        "operations": list(session.op_code),
        "artifacts": [asdict(a) for a in session.execution.artifacts] if session.execution else [],
        "stdout_excerpt": session.execution.stdout[:2000] if session.execution else "",
    }
    return summary


def _print_session(session: Session, as_json: bool) -> None:
    summary = _session_summary(session)
    if as_json:
        print(json.dumps(summary, indent=2))
        return
    print(f"session: {session.id}")
    print(f"directory: {summary['directory']}")
    for name, stage in summary["stages"].items():
        line = f"  {name}: {stage['status']} (attempts={stage['attempts']})"
        if stage["error"]:
            line += f" [{stage['error']['code']}]"
        print(line)
    if session.execution:
        print(f"execution status: {session.execution.status}")
        if summary["stdout_excerpt"]:
            print("stdout:")
            for line in summary["stdout_excerpt"].splitlines():
                print(f"  {line}")
        if summary["artifacts"]:
            print("artifacts:")
            for artifact in summary["artifacts"]:
                print(f"  {artifact['path']} ({artifact['size_bytes']} bytes)")


def _cmd_run(args: argparse.Namespace, mode: str) -> int:
    task = parse_task_file(args.task_file, session_name=args.session_name)
    config = _pipeline_config(args, mode)
    session = run_pipeline(task, config, session_id=args.session_id)
    _print_session(session, args.json)
    return 0 if session.succeeded else 1


def _cmd_validate_graph(args: argparse.Namespace) -> int:
    try:
        graph = read_graphml(Path(args.graph).read_bytes())
    except OSError as exc:
        return _fail(f"cannot read {args.graph}: {exc}")
    report = validate(graph)
    if args.json:
        payload = {
            "valid": report.valid,
            "errors": [asdict(f) for f in report.errors],
            "warnings": [asdict(f) for f in report.warnings],
            "stats": report.stats,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"{len(report.errors)} errors")
        print(report.summary())
    return 0 if report.valid else 1


def _cmd_render_prompts(args: argparse.Namespace) -> int:
    """Write every stage prompt for inspection; no provider, no sandbox."""
    task = parse_task_file(args.task_file)
    graph = read_graphml(Path(args.graph).read_bytes())
    report = validate(graph)
    if not report.valid:
        return _fail("graph fails validation:\n" + report.summary())

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    guidance = select_guidance(ALL_CATEGORIES)
    files: list[str] = []

    def write(name: str, text: str) -> None:
        path = out_dir / name
        path.write_text(text, encoding="utf-8", newline="")
        files.append(str(path))

    write("01_graph.txt", render_graph_prompt(task, "solution_graph.graphml").text)
    order = topo_operations(graph)
    placeholders = {op: f"# code for {op} is generated at run time" for op in order}
    for i, op in enumerate(order, start=2):
        signature = derive_signature(graph, op)
        ctx = OperationContext(
            signature=signature,
            ancestor_code=tuple((a, placeholders[a]) for a in ancestor_operations(graph, op)),
            descendant_defs=tuple(
                (s.name, s.description, s.function_definition, s.return_line)
                for s in descendant_operations(graph, op)
            ),
        )
        write(f"{i:02d}_operation_{op}.txt", render_operation_prompt(task, ctx, guidance).text)
    snippets = [(op, placeholders[op]) for op in order]
    write(f"{len(order) + 2:02d}_assembly.txt", render_assembly_prompt(task, snippets).text)

    if args.json:
        print(json.dumps({"files": files}, indent=2))
    else:
        for path in files:
            print(path)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    case = load_case(args.case)
    settings = _merged(args)
    config = _pipeline_config(args, args.mode or settings.get("mode", "replay"))
    trials = int(settings.get("trials", 1))
    report = run_trials(case, trials, config, parallel=args.parallel)
    if args.json:
        payload = {
            "case": report.case_id,
            "trials": report.trials,
            "successes": report.successes,
            "rate": report.rate,
            "results": [
                {
                    "index": r.index,
                    "session_id": r.session_id,
                    "passed": r.passed,
                    "error": r.error,
                }
                for r in report.trial_results
            ],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(report.table())
    return 0


def _cmd_show_session(args: argparse.Namespace) -> int:
    session = load_session(args.directory)
    _print_session(session, args.json)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--config", help="JSON config file; flags override its keys")


def _add_run_flags(parser: argparse.ArgumentParser, with_mode: bool) -> None:
    parser.add_argument("--task-file", required=True, help="task description file")
    if with_mode:
        parser.add_argument("--mode", choices=["live", "record", "replay"], default="live")
    parser.add_argument("--cassettes", help="cassette directory (record/replay)")
    parser.add_argument("--workspace", help="root directory for session workspaces")
    parser.add_argument("--model", help="provider model name")
    parser.add_argument("--temperature", type=float, help="sampling temperature")
    parser.add_argument("--timeout", type=float, help="sandbox timeout in seconds")
    parser.add_argument("--session-id", help="explicit session id")
    parser.add_argument("--session-name", help="session name (defaults to task file stem)")
    _add_common(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="llmgeo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the full pipeline for a task")
    _add_run_flags(run_p, with_mode=True)

    replay_p = sub.add_parser("replay", help="run the pipeline from recorded cassettes")
    _add_run_flags(replay_p, with_mode=False)

    record_p = sub.add_parser("record", help="run live and record cassettes")
    _add_run_flags(record_p, with_mode=False)

    validate_p = sub.add_parser("validate-graph", help="validate a GraphML solution graph")
    validate_p.add_argument("graph", help="GraphML file")
    _add_common(validate_p)

    render_p = sub.add_parser("render-prompts", help="write all stage prompts for inspection")
    render_p.add_argument("--task-file", required=True)
    render_p.add_argument("--graph", required=True, help="GraphML solution graph")
    render_p.add_argument("--out", default="prompts_out", help="output directory")
    _add_common(render_p)

    eval_p = sub.add_parser("eval", help="run repeated trials of a case study")
    eval_p.add_argument("--case", required=True, help="case id (case1, case2, case3)")
    eval_p.add_argument("--trials", type=int)
    eval_p.add_argument("--mode", choices=["live", "record", "replay"])
    eval_p.add_argument("--cassettes")
    eval_p.add_argument("--workspace")
    eval_p.add_argument("--model")
    eval_p.add_argument("--temperature", type=float)
    eval_p.add_argument("--timeout", type=float)
    eval_p.add_argument("--parallel", action="store_true", help="run trials in worker processes")
    _add_common(eval_p)

    show_p = sub.add_parser("show-session", help="pretty-print a persisted session")
    show_p.add_argument("directory", help="session directory")
    _add_common(show_p)
    return parser


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, args.mode)
        if args.command == "replay":
            return _cmd_run(args, "replay")
        if args.command == "record":
            return _cmd_run(args, "record")
        if args.command == "validate-graph":
            return _cmd_validate_graph(args)
        if args.command == "render-prompts":
            return _cmd_render_prompts(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "show-session":
            return _cmd_show_session(args)
    except LlmGeoError as exc:
        return _fail(str(exc))
    raise AssertionError(f"unhandled command {args.command}")


def main() -> None:
    sys.exit(dispatch())
