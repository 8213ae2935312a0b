import hashlib
import os
import time

import psutil
import pytest

from llmgeo.sandbox import (
    ExecRequest,
    SandboxIOError,
    ShimNotFoundError,
    WorkspaceExistsError,
    collect_artifacts,
    create_workspace,
    execute,
)


def run_code(tmp_path, shim_path, code, timeout=30.0, name="ws", globs=("**/*",), no_network=False):
    ws = create_workspace(tmp_path, name)
    (ws.root / "snippet.py").write_text(code, encoding="utf-8")
    req = ExecRequest(
        snippet_path="snippet.py", timeout_s=timeout, artifact_globs=globs, no_network=no_network
    )
    return ws, execute(ws, req, shim_path=shim_path)


class TestCreateWorkspace:
    def test_new_directory_is_empty(self, tmp_path):
        ws = create_workspace(tmp_path, "fresh")
        assert ws.root.is_dir()
        assert list(ws.root.iterdir()) == []

    def test_same_id_twice_collides(self, tmp_path):
        create_workspace(tmp_path, "dup")
        with pytest.raises(WorkspaceExistsError):
            create_workspace(tmp_path, "dup")

    def test_unusable_root_is_an_io_error(self, tmp_path):
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("file, not dir")
        with pytest.raises(SandboxIOError):
            create_workspace(blocker, "x")


class TestExecute:
    def test_trivial_print(self, tmp_path, shim_path):
        _, report = run_code(tmp_path, shim_path, "print(2+2)\n")
        assert report.status == "success"
        assert report.exit_code == 0
        assert report.stdout == "4\n"
        assert report.artifacts == ()
        assert report.exception is None

    def test_stderr_passes_through(self, tmp_path, shim_path):
        _, report = run_code(
            tmp_path, shim_path, "import sys; sys.stderr.write('warned\\n')\n"
        )
        assert report.status == "success"
        assert "warned" in report.stderr

    def test_exception_is_structured(self, tmp_path, shim_path):
        _, report = run_code(tmp_path, shim_path, "x = 1/0\n")
        assert report.status == "error"
        assert report.exit_code == 1
        assert report.exception is not None
        assert report.exception.type == "ZeroDivisionError"
        assert "ZeroDivisionError" in report.exception.traceback

    def test_infinite_loop_times_out(self, tmp_path, shim_path):
        started = time.monotonic()
        _, report = run_code(tmp_path, shim_path, "while True: pass\n", timeout=1.0)
        wall = time.monotonic() - started
        assert report.status == "timeout"
        assert report.exception is None
        assert report.duration_ms >= 1000
        assert report.duration_ms <= 3000
        assert wall < 5

    def test_no_orphan_processes_after_timeout(self, tmp_path, shim_path):
        # the snippet spawns a grandchild that would outlive a naive kill
        code = (
            "import subprocess, sys\n"
            "subprocess.Popen([sys.executable, '-c', 'import time; time.sleep(60)'])\n"
            "import time\n"
            "time.sleep(60)\n"
        )
        _, report = run_code(tmp_path, shim_path, code, timeout=1.5)
        assert report.status == "timeout"
        time.sleep(0.2)
        me = psutil.Process(os.getpid())
        leftovers = [p for p in me.children(recursive=True) if p.is_running()]
        assert leftovers == []

    def test_artifact_detection_with_digest(self, tmp_path, shim_path):
        ws, report = run_code(
            tmp_path,
            shim_path,
            "with open('population_map.png', 'wb') as f:\n    f.write(b'\\x89PNG fake body')\n",
        )
        assert report.status == "success"
        assert [a.path for a in report.artifacts] == ["population_map.png"]
        artifact = report.artifacts[0]
        blob = (ws.root / "population_map.png").read_bytes()
        assert artifact.size_bytes == len(blob)
        assert artifact.sha256 == hashlib.sha256(blob).hexdigest()

    def test_preexisting_files_are_not_artifacts(self, tmp_path, shim_path):
        ws = create_workspace(tmp_path, "pre")
        (ws.root / "input.csv").write_text("a,b\n1,2\n")
        (ws.root / "snippet.py").write_text("print(open('input.csv').readline().strip())\n")
        report = execute(ws, ExecRequest(snippet_path="snippet.py", timeout_s=30), shim_path=shim_path)
        assert report.status == "success"
        assert report.artifacts == ()

    def test_artifact_globs_filter(self, tmp_path, shim_path):
        _, report = run_code(
            tmp_path,
            shim_path,
            "open('a.png','w').write('x'); open('b.csv','w').write('y')\n",
            globs=("**/*.png",),
        )
        assert [a.path for a in report.artifacts] == ["a.png"]

    def test_missing_shim(self, tmp_path):
        ws = create_workspace(tmp_path, "noshim")
        (ws.root / "snippet.py").write_text("print('hi')\n")
        with pytest.raises(ShimNotFoundError):
            execute(
                ws,
                ExecRequest(snippet_path="snippet.py", timeout_s=5),
                shim_path=tmp_path / "missing_shim.py",
            )

    def test_environment_is_filtered(self, tmp_path, shim_path, monkeypatch):
        monkeypatch.setenv("LLMGEO_API_KEY", "super-secret")
        _, report = run_code(
            tmp_path,
            shim_path,
            "import os\nprint(os.environ.get('LLMGEO_API_KEY', 'ABSENT'))\n",
        )
        assert report.stdout == "ABSENT\n"

    def test_no_network_mode_blocks_sockets(self, tmp_path, shim_path):
        code = "import socket\nsocket.socket()\n"
        _, report = run_code(tmp_path, shim_path, code, no_network=True)
        assert report.status == "error"
        assert report.exception is not None
        assert "network access is disabled" in report.exception.message

    def test_report_is_total_for_hostile_snippets(self, tmp_path, shim_path):
        for i, code in enumerate(
            [
                "import sys\nsys.exit(3)\n",
                "raise SystemExit\n",
                "this is not python +++\n",
                "\x00\x01\x02\n",
            ]
        ):
            _, report = run_code(tmp_path, shim_path, code, name=f"hostile{i}")
            assert report.status in ("success", "error")

    def test_timeout_duration_within_slack(self, tmp_path, shim_path):
        _, report = run_code(tmp_path, shim_path, "import time\ntime.sleep(60)\n", timeout=1.0)
        assert report.status == "timeout"
        assert report.duration_ms <= 1000 + 2000


class TestCollectArtifacts:
    def test_empty_workspace(self, tmp_path):
        ws = create_workspace(tmp_path, "empty")
        assert collect_artifacts(ws) == ()

    def test_glob_selection_and_ordering(self, tmp_path):
        ws = create_workspace(tmp_path, "files")
        (ws.root / "b.csv").write_text("1")
        (ws.root / "a.png").write_bytes(b"png")
        (ws.root / "sub").mkdir()
        (ws.root / "sub" / "c.png").write_bytes(b"png2")
        only_png = collect_artifacts(ws, ("**/*.png",))
        assert [a.path for a in only_png] == ["a.png", "sub/c.png"]
        everything = collect_artifacts(ws)
        assert [a.path for a in everything] == ["a.png", "b.csv", "sub/c.png"]

    def test_deterministic(self, tmp_path):
        ws = create_workspace(tmp_path, "det")
        (ws.root / "x.bin").write_bytes(b"\x00" * 10)
        assert collect_artifacts(ws) == collect_artifacts(ws)

    def test_paths_never_escape_the_workspace(self, tmp_path):
        ws = create_workspace(tmp_path, "escape")
        outside = tmp_path / "outside.txt"
        outside.write_text("secret")
        (ws.root / "link.txt").symlink_to(outside)
        artifacts = collect_artifacts(ws)
        assert all(".." not in a.path and not a.path.startswith("/") for a in artifacts)
        assert [a.path for a in artifacts] == []
