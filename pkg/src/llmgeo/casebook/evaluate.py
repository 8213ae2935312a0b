"""Checking a finished session against a case study's expected results."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fnmatch import fnmatch

from llmgeo.casebook.cases import CaseStudy, ExpectedCheck
from llmgeo.errors import LlmGeoError
from llmgeo.pipeline.config import Session
from llmgeo.sandbox import ExecutionReport


class NoExecutionError(LlmGeoError):
    code = "NO_EXECUTION"


# integer renderings: plain digit runs or comma-grouped thousands, not glued
# to surrounding digits or separators ("15688769" must not match 5688769)
_NUMBER_RE = re.compile(r"(?<![\d,])(\d{1,3}(?:,\d{3})+|\d+)(?![\d,])")


def stdout_contains_number(text: str, expected: int) -> bool:
    """True iff some integer rendering in ``text`` equals ``expected``.

    Accepts grouped ("5,688,769") and ungrouped ("5688769") forms; never
    matches a different integer that merely shares digits.
    """
    for match in _NUMBER_RE.finditer(text):
        if int(match.group(1).replace(",", "")) == expected:
            return True
    return False


@dataclass(frozen=True)
class CheckResult:
    description: str
    passed: bool


@dataclass(frozen=True)
class CaseVerdict:
    case_id: str
    execution_status: str
    check_results: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return self.execution_status == "success" and all(r.passed for r in self.check_results)


def _check_one(report: ExecutionReport, check: ExpectedCheck) -> bool:
    if check.kind == "stdout_number":
        assert check.value is not None
        return stdout_contains_number(report.stdout, check.value)
    assert check.pattern is not None
    matches = [a for a in report.artifacts if fnmatch(a.path, check.pattern)]
    if check.kind == "artifact_nonempty":
        matches = [a for a in matches if a.size_bytes > 0]
    return len(matches) >= check.min_count


def evaluate(session: Session, case: CaseStudy) -> CaseVerdict:
    """Pure verdict over the session's execution report and the case checks."""
    if session.execution is None:
        raise NoExecutionError(f"session {session.id} has no execution report")
    report = session.execution
    results = tuple(
        CheckResult(description=check.describe(), passed=_check_one(report, check))
        for check in case.checks
    )
    return CaseVerdict(
        case_id=case.id, execution_status=report.status, check_results=results
    )
