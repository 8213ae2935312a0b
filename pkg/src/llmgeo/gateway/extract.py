"""Extraction of fenced code blocks from model replies.

The guidance tells the model to answer with exactly one ```python block,
but real replies stray: prose around the fence, several blocks, or an
unterminated fence. This parser takes the first block whose opening fence
carries the requested tag, warns when more than one matches, and raises a
typed error otherwise. It never raises anything else, whatever the input.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from llmgeo.errors import LlmGeoError


class NoCodeBlockError(LlmGeoError):
    code = "NO_CODE_BLOCK"


class UnterminatedFenceError(LlmGeoError):
    code = "UNTERMINATED_FENCE"


class MultipleCodeBlocksWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CodeSnippet:
    text: str
    fence_tag: str
    source_span: tuple[int, int]  # offsets of the interior text in the source content


def _is_open(line: str, tag: str) -> bool:
    return line.strip() == f"```{tag}"


def _is_close(line: str) -> bool:
    return line.strip() == "```"


def extract_fenced_code(content: str, fence_tag: str = "python") -> CodeSnippet:
    """Return the first ```<fence_tag> ... ``` block's interior text verbatim."""
    lines = content.split("\n")
    blocks: list[tuple[int, int]] = []  # (open line idx, close line idx)
    open_idx: int | None = None
    for i, line in enumerate(lines):
        if open_idx is None:
            if _is_open(line, fence_tag):
                open_idx = i
        elif _is_close(line):
            blocks.append((open_idx, i))
            open_idx = None

    if not blocks:
        if open_idx is not None:
            raise UnterminatedFenceError(
                f"```{fence_tag} fence opened at line {open_idx + 1} is never closed"
            )
        raise NoCodeBlockError(f"reply contains no ```{fence_tag} code block")

    if len(blocks) > 1 or open_idx is not None:
        warnings.warn(
            f"reply contains multiple ```{fence_tag} blocks; using the first",
            MultipleCodeBlocksWarning,
            stacklevel=2,
        )

    first_open, first_close = blocks[0]
    interior = lines[first_open + 1 : first_close]
    text = "\n".join(interior)
    # offset of the interior: length of all lines up to and including the open fence
    start = sum(len(line) + 1 for line in lines[: first_open + 1])
    return CodeSnippet(text=text, fence_tag=fence_tag, source_span=(start, start + len(text)))
