"""Success-rate harness: run the full pipeline repeatedly and tally verdicts.

Trials are share-nothing: each gets a fresh session id and workspace.
A trial that crashes (rather than failing a check) still counts as a
failure and never aborts the batch.
"""

from __future__ import annotations

import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from llmgeo.casebook.cases import CaseStudy, load_case
from llmgeo.casebook.evaluate import CaseVerdict, evaluate
from llmgeo.pipeline.config import PipelineConfig
from llmgeo.pipeline.runner import new_session_id, run


@dataclass(frozen=True)
class TrialResult:
    index: int
    session_id: str
    passed: bool
    verdict: CaseVerdict | None = None
    error: str | None = None


@dataclass(frozen=True)
class SuccessRateReport:
    case_id: str
    trials: int
    successes: int
    trial_results: tuple[TrialResult, ...]

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def table(self) -> str:
        lines = [f"case {self.case_id}: {self.successes}/{self.trials} passed (rate {self.rate:.2f})"]
        for result in self.trial_results:
            mark = "pass" if result.passed else "FAIL"
            note = f" ({result.error})" if result.error else ""
            lines.append(f"  trial {result.index:02d} [{mark}] session={result.session_id}{note}")
        return "\n".join(lines)


def _one_trial(case_id: str, config: PipelineConfig, index: int, gateway=None) -> TrialResult:
    case = load_case(case_id)
    session_id = new_session_id(f"{case_id}-trial{index:02d}")
    try:
        session = run(case.task, config, session_id=session_id, gateway=gateway)
        if session.execution is None:
            failed = [
                f"{name}={state.last_error.code}"
                for name, state in session.stage_states.items()
                if state.last_error is not None
            ]
            return TrialResult(
                index=index,
                session_id=session_id,
                passed=False,
                error="no execution report: " + (", ".join(failed) or "stages incomplete"),
            )
        verdict = evaluate(session, case)
        return TrialResult(index=index, session_id=session_id, passed=verdict.passed, verdict=verdict)
    except Exception as exc:
        return TrialResult(
            index=index,
            session_id=session_id,
            passed=False,
            error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc(limit=3)}",
        )


def run_trials(
    case: CaseStudy,
    n: int,
    config: PipelineConfig,
    *,
    parallel: bool = False,
    gateway=None,
) -> SuccessRateReport:
    """Run ``n`` independent pipeline sessions for ``case`` and report the rate.

    ``gateway`` (in-process provider injection) only applies to sequential
    runs; parallel trials rebuild their gateway from the config in each
    worker process.
    """
    if n < 1:
        raise ValueError("need at least one trial")

    if parallel and gateway is None:
        with ProcessPoolExecutor() as pool:
            futures = [pool.submit(_one_trial, case.id, config, i) for i in range(1, n + 1)]
            results = [f.result() for f in futures]
    else:
        results = [_one_trial(case.id, config, i, gateway=gateway) for i in range(1, n + 1)]

    results.sort(key=lambda r: r.index)
    successes = sum(1 for r in results if r.passed)
    return SuccessRateReport(
        case_id=case.id, trials=n, successes=successes, trial_results=tuple(results)
    )
