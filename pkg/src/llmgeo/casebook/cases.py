"""Committed case-study definitions.

Each case ships as two assets: the task in task-file format (byte-exact
transcription of the original problem statement) and a checks.json with
the expected-result checks the run must satisfy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from llmgeo.errors import LlmGeoError
from llmgeo.taskfile import parse_task_text
from llmgeo.workflow.model import TaskSpec

CHECK_KINDS = ("stdout_number", "artifact_exists", "artifact_nonempty")


class UnknownCaseError(LlmGeoError):
    code = "UNKNOWN_CASE"


@dataclass(frozen=True)
class ExpectedCheck:
    kind: str
    value: int | None = None  # stdout_number only
    pattern: str | None = None  # artifact kinds only
    min_count: int = 1

    def __post_init__(self) -> None:
        if self.kind not in CHECK_KINDS:
            raise ValueError(f"unknown check kind {self.kind!r}")
        if self.kind == "stdout_number":
            if self.value is None or self.pattern is not None:
                raise ValueError("stdout_number checks take a value and no pattern")
        else:
            if self.pattern is None or self.value is not None:
                raise ValueError(f"{self.kind} checks take a pattern and no value")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")

    def describe(self) -> str:
        if self.kind == "stdout_number":
            return f"stdout contains the integer {self.value}"
        count = f" (at least {self.min_count})" if self.min_count > 1 else ""
        verb = "non-empty artifact" if self.kind == "artifact_nonempty" else "artifact"
        return f"{verb} matching {self.pattern!r}{count}"


@dataclass(frozen=True)
class CaseStudy:
    id: str
    task: TaskSpec
    checks: tuple[ExpectedCheck, ...]

    def __post_init__(self) -> None:
        if not self.checks:
            raise ValueError("a case study needs at least one check")


def known_cases() -> list[str]:
    return ["case1", "case2", "case3"]


def case_task_text(case_id: str) -> str:
    """The committed task transcription, exactly as shipped."""
    if case_id not in known_cases():
        raise UnknownCaseError(f"no case study named {case_id!r}")
    path = resources.files("llmgeo.casebook") / "assets" / case_id / "task.txt"
    return path.read_text(encoding="utf-8")


def load_case(case_id: str) -> CaseStudy:
    if case_id not in known_cases():
        raise UnknownCaseError(f"no case study named {case_id!r}")
    base = resources.files("llmgeo.casebook") / "assets" / case_id
    task = parse_task_text(case_task_text(case_id), session_name=case_id)
    raw = json.loads((base / "checks.json").read_text(encoding="utf-8"))
    checks = tuple(
        ExpectedCheck(
            kind=item["kind"],
            value=item.get("value"),
            pattern=item.get("pattern"),
            min_count=item.get("min_count", 1),
        )
        for item in raw["checks"]
    )
    return CaseStudy(id=case_id, task=task, checks=checks)
