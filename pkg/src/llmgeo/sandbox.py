"""Sandboxed execution of generated code in a child interpreter.

Each run gets a workspace directory; the runtime shim is launched as a
child process (its own session, so the whole process tree can be killed on
timeout) with a filtered environment, working directory at the workspace
root, and a file-based request/report protocol under ``.sandbox/``.
Artifacts are whatever files the snippet created or modified, detected by
a before/after snapshot of the workspace.
"""

from __future__ import annotations

import hashlib
import json
import os
import signal
import subprocess
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from llmgeo.errors import LlmGeoError

PROTOCOL_DIR = ".sandbox"

# Variables the child inherits; everything else (including any API key) is dropped.
ENV_ALLOWLIST = (
    "PATH",
    "HOME",
    "LANG",
    "LANGUAGE",
    "LC_ALL",
    "LC_CTYPE",
    "TMPDIR",
    "TEMP",
    "TMP",
    "PYTHONPATH",
    "VIRTUAL_ENV",
    "SSL_CERT_FILE",
    "REQUESTS_CA_BUNDLE",
)


class SandboxError(LlmGeoError):
    code = "SANDBOX_ERROR"


class SandboxIOError(SandboxError):
    code = "IO_ERROR"


class WorkspaceExistsError(SandboxError):
    code = "ALREADY_EXISTS"


class ShimNotFoundError(SandboxError):
    code = "SHIM_NOT_FOUND"


class ProtocolError(SandboxError):
    code = "PROTOCOL_ERROR"


@dataclass(frozen=True)
class Workspace:
    root: Path
    created_at: str


@dataclass(frozen=True)
class ExecRequest:
    snippet_path: str  # relative to the workspace root
    timeout_s: float
    artifact_globs: tuple[str, ...] = ("**/*",)
    no_network: bool = False

    def __post_init__(self) -> None:
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")


@dataclass(frozen=True)
class Artifact:
    path: str  # relative to the workspace root
    size_bytes: int
    sha256: str


@dataclass(frozen=True)
class ExceptionInfo:
    type: str
    message: str
    traceback: str


@dataclass(frozen=True)
class ExecutionReport:
    status: str  # success | error | timeout
    exit_code: int
    stdout: str
    stderr: str
    duration_ms: int
    artifacts: tuple[Artifact, ...] = ()
    exception: ExceptionInfo | None = None


def create_workspace(root: str | Path, name: str) -> Workspace:
    """Fresh empty directory ``root/name``; an existing one is an error."""
    base = Path(root)
    target = base / name
    try:
        base.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SandboxIOError(f"workspace root {base} is unusable: {exc}") from exc
    try:
        target.mkdir()
    except FileExistsError:
        raise WorkspaceExistsError(f"workspace {target} already exists") from None
    except OSError as exc:
        raise SandboxIOError(f"cannot create workspace {target}: {exc}") from exc
    return Workspace(root=target, created_at=datetime.now(timezone.utc).isoformat())


def default_shim_path() -> Path | None:
    """Locate the bundled runtime shim: env override, then repo-relative."""
    env = os.environ.get("LLMGEO_SHIM")
    if env:
        return Path(env)
    here = Path(__file__).resolve()
    for parent in here.parents:
        candidate = parent / "shim" / "runtime_shim.py"
        if candidate.exists():
            return candidate
    return None


def _filtered_env() -> dict[str, str]:
    env = {name: os.environ[name] for name in ENV_ALLOWLIST if name in os.environ}
    env["MPLBACKEND"] = "Agg"
    env["PYTHONDONTWRITEBYTECODE"] = "1"
    return env


def _inside(root: Path, path: Path) -> bool:
    try:
        path.resolve().relative_to(root.resolve())
        return True
    except ValueError:
        return False


def _snapshot(root: Path) -> dict[str, tuple[int, int]]:
    """relpath -> (size, mtime_ns) for every regular file outside .sandbox."""
    state: dict[str, tuple[int, int]] = {}
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if d != PROTOCOL_DIR]
        for filename in filenames:
            full = Path(dirpath) / filename
            if not full.is_file() or not _inside(root, full):
                continue
            rel = full.relative_to(root).as_posix()
            stat = full.stat()
            state[rel] = (stat.st_size, stat.st_mtime_ns)
    return state


def _matched(root: Path, globs: tuple[str, ...]) -> set[str]:
    hits: set[str] = set()
    for pattern in globs:
        for path in root.glob(pattern):
            if not path.is_file() or not _inside(root, path):
                continue
            rel = path.relative_to(root).as_posix()
            if rel.split("/", 1)[0] == PROTOCOL_DIR:
                continue
            hits.add(rel)
    return hits


def _digest(path: Path) -> str:
    hasher = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def _to_artifacts(root: Path, relpaths: set[str]) -> tuple[Artifact, ...]:
    result = []
    for rel in sorted(relpaths):
        full = root / rel
        if not full.is_file():
            continue
        result.append(Artifact(path=rel, size_bytes=full.stat().st_size, sha256=_digest(full)))
    return tuple(result)


def collect_artifacts(ws: Workspace, globs: tuple[str, ...] = ("**/*",)) -> tuple[Artifact, ...]:
    """Every file under the workspace matching the globs, lexicographic order."""
    if not ws.root.is_dir():
        raise SandboxIOError(f"workspace {ws.root} does not exist")
    return _to_artifacts(ws.root, _matched(ws.root, globs))


def execute(
    ws: Workspace,
    req: ExecRequest,
    shim_path: str | Path | None = None,
    runtime: str | None = None,
) -> ExecutionReport:
    """Run one snippet through the shim with a wall-clock timeout.

    Never raises for anything the snippet does; failures of the harness
    itself (missing shim, unreadable shim report) raise typed errors.
    """
    shim = Path(shim_path) if shim_path is not None else default_shim_path()
    if shim is None or not shim.exists():
        raise ShimNotFoundError(f"runtime shim not found at {shim}")
    snippet_file = ws.root / req.snippet_path
    if not snippet_file.is_file():
        raise SandboxIOError(f"snippet {req.snippet_path!r} not found under {ws.root}")

    protocol_dir = ws.root / PROTOCOL_DIR
    protocol_dir.mkdir(exist_ok=True)
    report_path = protocol_dir / "report.json"
    if report_path.exists():
        report_path.unlink()
    request_path = protocol_dir / "request.json"
    request_path.write_text(
        json.dumps(
            {
                "snippet_path": req.snippet_path,
                "timeout_s": req.timeout_s,
                "report_path": f"{PROTOCOL_DIR}/report.json",
                "no_network": req.no_network,
            },
            indent=2,
        ),
        encoding="utf-8",
    )

    before = _snapshot(ws.root)
    started = time.monotonic()
    proc = subprocess.Popen(
        [runtime or sys.executable, str(shim), f"{PROTOCOL_DIR}/request.json"],
        cwd=ws.root,
        env=_filtered_env(),
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        start_new_session=True,
    )
    timed_out = False
    try:
        stdout, stderr = proc.communicate(timeout=req.timeout_s)
    except subprocess.TimeoutExpired:
        timed_out = True
        try:
            os.killpg(proc.pid, signal.SIGKILL)
        except ProcessLookupError:
            pass
        stdout, stderr = proc.communicate()
    duration_ms = int((time.monotonic() - started) * 1000)

    after = _snapshot(ws.root)
    changed = {rel for rel, sig in after.items() if before.get(rel) != sig}
    artifacts = _to_artifacts(ws.root, changed & _matched(ws.root, req.artifact_globs))

    if timed_out:
        return ExecutionReport(
            status="timeout",
            exit_code=proc.returncode if proc.returncode is not None else -1,
            stdout=stdout,
            stderr=stderr,
            duration_ms=duration_ms,
            artifacts=artifacts,
        )

    shim_report = None
    if report_path.exists():
        try:
            shim_report = json.loads(report_path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, OSError):
            shim_report = None

    if proc.returncode == 0:
        if not isinstance(shim_report, dict) or shim_report.get("status") != "success":
            raise ProtocolError(
                f"shim exited 0 but left no usable report at {report_path}"
            )
        return ExecutionReport(
            status="success",
            exit_code=0,
            stdout=stdout,
            stderr=stderr,
            duration_ms=duration_ms,
            artifacts=artifacts,
        )

    exception = None
    if isinstance(shim_report, dict) and shim_report.get("exception"):
        raw = shim_report["exception"]
        exception = ExceptionInfo(
            type=str(raw.get("type", "")),
            message=str(raw.get("message", "")),
            traceback=str(raw.get("traceback", "")),
        )
    return ExecutionReport(
        status="error",
        exit_code=proc.returncode,
        stdout=stdout,
        stderr=stderr,
        duration_ms=duration_ms,
        artifacts=artifacts,
        exception=exception,
    )
