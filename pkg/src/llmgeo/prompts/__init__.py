"""Prompt templates, guidance registry, and stage prompt rendering."""

from llmgeo.prompts.guidance import (
    ALL_CATEGORIES,
    GuidanceCategory,
    GuidanceItem,
    load_registry,
    select_guidance,
)
from llmgeo.prompts.render import (
    STAGE_ASSEMBLY,
    STAGE_GRAPH,
    STAGE_OPERATION,
    EmptyCodeError,
    OperationContext,
    RenderedPrompt,
    TemplateMissingError,
    render_assembly_prompt,
    render_graph_prompt,
    render_operation_prompt,
)

__all__ = [
    "ALL_CATEGORIES",
    "EmptyCodeError",
    "GuidanceCategory",
    "GuidanceItem",
    "OperationContext",
    "RenderedPrompt",
    "STAGE_ASSEMBLY",
    "STAGE_GRAPH",
    "STAGE_OPERATION",
    "TemplateMissingError",
    "load_registry",
    "render_assembly_prompt",
    "render_graph_prompt",
    "render_operation_prompt",
    "select_guidance",
]
