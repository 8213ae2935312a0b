"""Task-file parsing.

The on-disk format mirrors how tasks are written by hand: objective lines
first (optionally under a ``Task:`` header), then a ``Data locations:``
header followed by numbered entries. Entries may be numbered ``1.`` or
``1)`` and may wrap onto continuation lines.

    Task:
    1) Find out ...
    2) Generate a map ...

    Data locations:
    1. NC hazardous waste facility ESRI shape file location: https://...
    2. NC tract boundary shapefile location: https://...
"""

from __future__ import annotations

import re
from pathlib import Path

from llmgeo.errors import LlmGeoError
from llmgeo.workflow.model import DataLocation, TaskSpec


class TaskFileError(LlmGeoError):
    code = "TASK_FILE_ERROR"


_ENTRY_RE = re.compile(r"^\s*(\d+)[.)]\s*(.*)$")
_URI_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9+.-]*://\S+")


def _extract_uri(entry_text: str) -> str:
    match = _URI_RE.search(entry_text)
    if match:
        return match.group(0).rstrip(".,;")
    # fall back to the first path-looking token, else the whole entry
    for token in entry_text.split():
        if "/" in token or "\\" in token:
            return token.rstrip(".,;")
    return entry_text.strip()


def parse_task_text(text: str, session_name: str) -> TaskSpec:
    task_lines: list[str] = []
    entries: list[str] = []
    in_locations = False
    for raw in text.splitlines():
        line = raw.rstrip()
        if not in_locations and line.strip().lower().startswith("data locations"):
            in_locations = True
            continue
        if not in_locations:
            if line.strip().lower() == "task:":
                continue
            if line.strip():
                task_lines.append(line.strip())
        else:
            match = _ENTRY_RE.match(line)
            if match:
                entries.append(match.group(2).strip())
            elif line.strip():
                if not entries:
                    raise TaskFileError(f"data location line without a number: {line!r}")
                entries[-1] += " " + line.strip()

    if not task_lines:
        raise TaskFileError("task file has no task lines")

    locations = tuple(
        DataLocation(index=i, uri=_extract_uri(entry), notes=entry)
        for i, entry in enumerate(entries, start=1)
    )
    return TaskSpec(session_name=session_name, task_text=tuple(task_lines), data_locations=locations)


def parse_task_file(path: str | Path, session_name: str | None = None) -> TaskSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TaskFileError(f"cannot read task file {path}: {exc}") from exc
    name = session_name if session_name is not None else path.stem
    # file stems like "case1_task" should still give directory-safe names
    name = re.sub(r"[^A-Za-z0-9._-]", "_", name) or "task"
    return parse_task_text(text, name)
