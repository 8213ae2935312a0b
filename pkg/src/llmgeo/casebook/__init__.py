"""Case studies in machine-readable form, expected-result checks, and the
success-rate trial runner."""

from llmgeo.casebook.cases import (
    CaseStudy,
    ExpectedCheck,
    UnknownCaseError,
    known_cases,
    load_case,
)
from llmgeo.casebook.evaluate import (
    CaseVerdict,
    CheckResult,
    NoExecutionError,
    evaluate,
    stdout_contains_number,
)
from llmgeo.casebook.trials import SuccessRateReport, TrialResult, run_trials

__all__ = [
    "CaseStudy",
    "CaseVerdict",
    "CheckResult",
    "ExpectedCheck",
    "NoExecutionError",
    "SuccessRateReport",
    "TrialResult",
    "UnknownCaseError",
    "evaluate",
    "known_cases",
    "load_case",
    "run_trials",
    "stdout_contains_number",
]
