"""Byte-deterministic prompt rendering for the three pipeline stages.

Templates are plain UTF-8 text assets with ``{name}`` placeholders. Only
the known placeholder names are substituted, so literal braces elsewhere in
a template (the graph prompt contains a dict example) pass through
untouched. Rendered text always uses LF line endings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from llmgeo.errors import LlmGeoError
from llmgeo.prompts.guidance import GuidanceItem
from llmgeo.workflow.model import OperationSignature, TaskSpec

STAGE_GRAPH = "graph"
STAGE_OPERATION = "operation"
STAGE_ASSEMBLY = "assembly"


class TemplateMissingError(LlmGeoError):
    code = "TEMPLATE_MISSING"


class EmptyCodeError(LlmGeoError):
    code = "EMPTY_CODE"


@dataclass(frozen=True)
class RenderedPrompt:
    stage: str
    text: str

    @property
    def char_count(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class OperationContext:
    """Everything one operation's prompt needs beyond the task itself.

    ``ancestor_code`` pairs (operation name, code text) in ancestor
    topological order; ``descendant_defs`` carries tuples of
    (node_name, description, function_definition, return_line).
    """

    signature: OperationSignature
    ancestor_code: tuple[tuple[str, str], ...] = ()
    descendant_defs: tuple[tuple[str, str, str, str], ...] = ()


_PLACEHOLDER_RE = re.compile(
    r"\{(task|data_locations|graphml_path|guidance|ancestor_code|descendant_defs|code"
    r"|signature\.(?:description|function_definition|return_line))\}"
)


def _load_template(name: str) -> str:
    try:
        path = resources.files("llmgeo.prompts") / "templates" / name
        text = path.read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise TemplateMissingError(f"template asset {name!r} not found") from exc
    return text.replace("\r\n", "\n")


def _fill(template: str, values: dict[str, str]) -> str:
    def sub(match: re.Match[str]) -> str:
        key = match.group(1)
        if key not in values:
            raise TemplateMissingError(f"template placeholder {{{key}}} has no value")
        return values[key]

    return _PLACEHOLDER_RE.sub(sub, template)


def render_graph_prompt(task: TaskSpec, graphml_out_path: str) -> RenderedPrompt:
    """Prompt asking the model for the solution-graph construction code."""
    if not graphml_out_path:
        raise ValueError("graphml_out_path must be non-empty")
    text = _fill(
        _load_template("graph_prompt.txt"),
        {
            "task": task.task_block(),
            "data_locations": task.data_locations_block(),
            "graphml_path": graphml_out_path,
        },
    )
    return RenderedPrompt(stage=STAGE_GRAPH, text=text)


def _numbered_guidance(guidance: list[GuidanceItem] | tuple[GuidanceItem, ...], start: int) -> str:
    ordered = sorted(guidance, key=lambda item: item.id)
    return "\n".join(f"{n}. {item.text}" for n, item in enumerate(ordered, start=start))


def render_operation_prompt(
    task: TaskSpec,
    ctx: OperationContext,
    guidance: list[GuidanceItem] | tuple[GuidanceItem, ...],
) -> RenderedPrompt:
    """Prompt asking the model to implement one operation as a function.

    The three signature lines are requirements 1-3; guidance items follow,
    numbered consecutively. Empty ancestor/descendant blocks keep their
    headers with an empty fenced body.
    """
    ancestor_block = "\n".join(code.rstrip("\n") for _, code in ctx.ancestor_code)
    descendant_block = "\n".join(
        "{'node_name': %r, 'description': %r, 'function_definition': %r, 'return_line': %r}"
        % (name, desc, fdef, ret)
        for name, desc, fdef, ret in ctx.descendant_defs
    )
    text = _fill(
        _load_template("operation_prompt.txt"),
        {
            "task": task.task_block(),
            "data_locations": task.data_locations_block(),
            "signature.description": ctx.signature.description,
            "signature.function_definition": ctx.signature.function_definition,
            "signature.return_line": ctx.signature.return_line,
            "guidance": _numbered_guidance(guidance, start=4),
            "ancestor_code": ancestor_block,
            "descendant_defs": descendant_block,
        },
    )
    return RenderedPrompt(stage=STAGE_OPERATION, text=text)


def render_assembly_prompt(
    task: TaskSpec,
    code_snippets: list[tuple[str, str]] | tuple[tuple[str, str], ...],
    guidance: list[GuidanceItem] | tuple[GuidanceItem, ...] = (),
) -> RenderedPrompt:
    """Prompt asking the model for the main program that wires all functions.

    ``code_snippets`` must already be in topological order; the rendered
    Code block preserves that order, so permuting snippets changes bytes.
    """
    if not code_snippets:
        raise EmptyCodeError("assembly prompt needs at least one code snippet")
    code_block = "\n".join(code.rstrip("\n") for _, code in code_snippets)
    text = _fill(
        _load_template("assembly_prompt.txt"),
        {
            "task": task.task_block(),
            "data_locations": task.data_locations_block(),
            "code": code_block,
        },
    )
    return RenderedPrompt(stage=STAGE_ASSEMBLY, text=text)
