import json
import subprocess
import sys

import pytest

from llmgeo.cli import dispatch


def run_cli(argv, capsys):
    code = dispatch(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidateGraph:
    def test_valid_fixture_graph(self, fixtures_dir, capsys):
        code, out, _ = run_cli(["validate-graph", str(fixtures_dir / "case1.graphml")], capsys)
        assert code == 0
        assert "0 errors" in out

    def test_json_output(self, fixtures_dir, capsys):
        code, out, _ = run_cli(
            ["validate-graph", str(fixtures_dir / "case1.graphml"), "--json"], capsys
        )
        payload = json.loads(out)
        assert code == 0
        assert payload["valid"] is True
        assert payload["stats"]["data"] == 9
        assert payload["stats"]["operation"] == 6
        assert payload["stats"]["edges"] == 15

    def test_invalid_graph_exits_one(self, tmp_path, capsys):
        doc = """<graphml xmlns="http://graphml.graphdrawing.org/xmlns"><graph>
        <node id="a"><data key="node_type">data</data></node>
        <node id="b"><data key="node_type">data</data></node>
        <edge source="a" target="b" />
        </graph></graphml>"""
        path = tmp_path / "bad.graphml"
        path.write_text(doc)
        code, out, _ = run_cli(["validate-graph", str(path)], capsys)
        assert code == 1
        assert "ALTERNATION" in out

    def test_missing_file_exits_one_with_stderr_diagnostic(self, tmp_path, capsys):
        code, _, err = run_cli(["validate-graph", str(tmp_path / "none.graphml")], capsys)
        assert code == 1
        assert err.strip()


class TestUsageErrors:
    def test_run_without_task_file_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            dispatch(["run"])
        assert excinfo.value.code == 2

    def test_unknown_command_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            dispatch(["frobnicate"])
        assert excinfo.value.code == 2


class TestReplayCommand:
    def test_replay_case1(self, tmp_path, fixtures_dir, case1_cassettes, capsys):
        code, out, _ = run_cli(
            [
                "replay",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(tmp_path / "ws"),
                "--json",
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["succeeded"] is True
        assert payload["stages"]["execute"]["status"] == "succeeded"
        assert [a["path"] for a in payload["artifacts"]] == ["population_map.png"]
        assert "5688769" in payload["stdout_excerpt"]

    def test_run_mode_replay_equivalent(self, tmp_path, fixtures_dir, case1_cassettes, capsys):
        code, out, _ = run_cli(
            [
                "run",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--mode",
                "replay",
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(tmp_path / "ws2"),
            ],
            capsys,
        )
        assert code == 0
        assert "execution status: success" in out

    def test_failing_replay_exits_one(self, tmp_path, fixtures_dir, capsys):
        code, out, _ = run_cli(
            [
                "replay",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--cassettes",
                str(fixtures_dir / "cassettes" / "case1_broken_graph"),
                "--workspace",
                str(tmp_path / "ws3"),
            ],
            capsys,
        )
        assert code == 1
        assert "NO_CODE_BLOCK" in out

    def test_no_secret_in_output(self, tmp_path, fixtures_dir, case1_cassettes, capsys, monkeypatch):
        secret = "sk-cli-secret-98765"
        monkeypatch.setenv("LLMGEO_API_KEY", secret)
        _, out, err = run_cli(
            [
                "replay",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(tmp_path / "ws4"),
            ],
            capsys,
        )
        assert secret not in out and secret not in err


class TestRenderPrompts:
    def test_writes_all_stage_prompts_offline(self, tmp_path, fixtures_dir, capsys, monkeypatch):
        import socket

        def refuse(*args, **kwargs):
            raise AssertionError("render-prompts must not open sockets")

        monkeypatch.setattr(socket, "socket", refuse)
        out_dir = tmp_path / "rendered"
        code, out, _ = run_cli(
            [
                "render-prompts",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--graph",
                str(fixtures_dir / "case1.graphml"),
                "--out",
                str(out_dir),
            ],
            capsys,
        )
        assert code == 0
        names = sorted(p.name for p in out_dir.iterdir())
        assert names[0] == "01_graph.txt"
        assert names[-1] == "08_assembly.txt"
        assert len(names) == 8
        join_prompt = (out_dir / "05_operation_join_tract_pop.txt").read_text()
        assert "join_tract_pop(nc_tract_gdf=nc_tract_gdf, nc_tract_pop_df=nc_tract_pop_df)" in join_prompt


class TestEvalCommand:
    def test_eval_replay_trials(self, tmp_path, case1_cassettes, capsys):
        code, out, _ = run_cli(
            [
                "eval",
                "--case",
                "case1",
                "--trials",
                "2",
                "--mode",
                "replay",
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(tmp_path / "ev"),
                "--json",
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["trials"] == 2
        assert payload["successes"] == 2
        assert payload["rate"] == 1.0

    def test_unknown_case_exits_one(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["eval", "--case", "case0", "--trials", "1", "--workspace", str(tmp_path)], capsys
        )
        assert code == 1
        assert "UNKNOWN_CASE" in err


class TestShowSession:
    def test_round_trip_display(self, tmp_path, fixtures_dir, case1_cassettes, capsys):
        code, out, _ = run_cli(
            [
                "replay",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--session-id",
                "showme",
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(tmp_path / "ws"),
            ],
            capsys,
        )
        assert code == 0
        code, out, _ = run_cli(["show-session", str(tmp_path / "ws" / "showme")], capsys)
        assert code == 0
        assert "session: showme" in out
        assert "execution status: success" in out

    def test_corrupt_dir_exits_one(self, tmp_path, capsys):
        code, _, err = run_cli(["show-session", str(tmp_path / "nope")], capsys)
        assert code == 1
        assert "CORRUPT_SESSION" in err


def test_config_file_supplies_defaults_and_flags_override(
    tmp_path, fixtures_dir, case1_cassettes, capsys
):
    config_file = tmp_path / "llmgeo.json"
    config_file.write_text(
        json.dumps(
            {
                "cassettes": str(case1_cassettes),
                "workspace": str(tmp_path / "from-config"),
                "timeout": 120,
            }
        )
    )
    code, out, _ = run_cli(
        [
            "replay",
            "--task-file",
            str(fixtures_dir / "case1_task.txt"),
            "--session-name",
            "case1",
            "--config",
            str(config_file),
            "--json",
        ],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["succeeded"] is True
    assert (tmp_path / "from-config").is_dir()


def test_console_entry_point_smoke(fixtures_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "llmgeo", "validate-graph", str(fixtures_dir / "case1.graphml")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "0 errors" in proc.stdout


def test_identical_replay_invocations_produce_identical_outputs(
    tmp_path, fixtures_dir, case1_cassettes, capsys
):
    def one(workspace, session_id):
        code = dispatch(
            [
                "replay",
                "--task-file",
                str(fixtures_dir / "case1_task.txt"),
                "--session-name",
                "case1",
                "--session-id",
                session_id,
                "--cassettes",
                str(case1_cassettes),
                "--workspace",
                str(workspace),
                "--json",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        # normalize the only run-specific parts: session id and absolute paths
        return out.replace(session_id, "SID").replace(str(workspace), "WS")

    first = one(tmp_path / "w1", "alpha")
    second = one(tmp_path / "w2", "beta")
    assert first == second


def test_eval_parallel_flag(tmp_path, case1_cassettes, capsys):
    code = dispatch(
        [
            "eval",
            "--case",
            "case1",
            "--trials",
            "2",
            "--mode",
            "replay",
            "--parallel",
            "--cassettes",
            str(case1_cassettes),
            "--workspace",
            str(tmp_path / "par"),
            "--json",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    payload = json.loads(out)
    assert payload["successes"] == 2
