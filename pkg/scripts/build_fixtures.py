#!/usr/bin/env python3
"""Regenerate every committed fixture under fixtures/.

Runs the real pipeline in record mode against a stub provider that serves
the response texts from fixtures/responses/case1/, so the cassettes'
canonical keys always match what a replay run will compute. Also emits the
canonical solution graph, the golden prompts (straight from the session
transcript), the canonical-key golden table, and the failure-path cassette
variants used by the pipeline tests.

Usage: python scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from llmgeo.casebook.cases import case_task_text, load_case
from llmgeo.gateway.client import CassetteStore, Gateway, canonical_key, canonical_request_json, user_request
from llmgeo.gateway.types import Cassette, ChatResponse
from llmgeo.pipeline.config import PipelineConfig
from llmgeo.pipeline.runner import run
from llmgeo.prompts.render import render_graph_prompt
from llmgeo.workflow.graphml import write_graphml

FIXTURES = REPO / "fixtures"
RESPONSES = FIXTURES / "responses" / "case1"
RECORDED_AT = "2023-05-28T00:00:00+00:00"


class SequenceProvider:
    """Serves the committed response texts in pipeline call order."""

    def __init__(self, texts: list[str]):
        self.texts = texts
        self.calls = 0

    def __call__(self, request) -> ChatResponse:
        if self.calls >= len(self.texts):
            raise RuntimeError(f"stub provider exhausted after {self.calls} calls")
        text = self.texts[self.calls]
        self.calls += 1
        return ChatResponse(content=text, finish_reason="stop")


def response_texts() -> list[str]:
    files = sorted(RESPONSES.glob("*.md"))
    if len(files) != 8:
        raise SystemExit(f"expected 8 response fixtures in {RESPONSES}, found {len(files)}")
    return [path.read_text(encoding="utf-8") for path in files]


def build_case1(cassette_dir: Path) -> None:
    if cassette_dir.exists():
        shutil.rmtree(cassette_dir)
    cassette_dir.mkdir(parents=True)

    case = load_case("case1")
    with tempfile.TemporaryDirectory() as tmp:
        config = PipelineConfig(
            mode="record",
            workspace_root=Path(tmp),
            cassette_dir=cassette_dir,
            sandbox_timeout_s=120,
        )
        gateway = Gateway(
            provider_config=config.provider,
            cassette_store=CassetteStore(cassette_dir),
            provider=SequenceProvider(response_texts()),
            clock=lambda: RECORDED_AT,
        )
        session = run(case.task, config, session_id="case1-fixture", gateway=gateway)

        failures = {
            name: state.last_error
            for name, state in session.stage_states.items()
            if state.status != "succeeded"
        }
        if failures:
            raise SystemExit(f"fixture pipeline run failed: {failures}")
        if session.execution is None or session.execution.status != "success":
            raise SystemExit(f"fixture execution did not succeed: {session.execution}")
        print(f"recorded {len(list(cassette_dir.glob('*.json')))} cassettes")
        print("final stdout:", session.execution.stdout.strip())
        print("artifacts:", [a.path for a in session.execution.artifacts])

        assert session.graph is not None
        (FIXTURES / "case1.graphml").write_bytes(write_graphml(session.graph))

        golden = FIXTURES / "golden"
        golden.mkdir(exist_ok=True)
        for entry in session.transcript:
            if entry.stage == "graph":
                name = "case1_graph_prompt.txt"
            elif entry.stage == "operation" and entry.op_name == "join_tract_pop":
                name = "case1_operation_join_tract_pop_prompt.txt"
            elif entry.stage == "assembly":
                name = "case1_assembly_prompt.txt"
            else:
                continue
            (golden / name).write_text(entry.prompt.text, encoding="utf-8", newline="")
        print("golden prompts written")


def build_failure_variants() -> None:
    """Cassette sets that force specific graph-stage failures in replay."""
    case = load_case("case1")
    config = PipelineConfig()
    prompt = render_graph_prompt(case.task, config.graphml_filename)
    request = user_request(
        prompt.text, model=config.provider.model, stage_tag="graph", temperature=0.0
    )

    variants = {
        "case1_broken_graph": "I am sorry, I cannot produce a graph for this task right now.",
        "case1_crash_graph": "```python\nraise RuntimeError('synthetic failure while building the graph')\n```\n",
        "case1_invalid_graph": (
            "```python\n"
            "import networkx as nx\n"
            "G = nx.DiGraph()\n"
            'G.add_node("a_url", node_type="data", data_path="https://example.org/a.zip", description="input")\n'
            'G.add_node("load_a", node_type="operation", description="load a")\n'
            'G.add_edge("a_url", "load_a")\n'
            'G.add_node("a_df", node_type="data", description="loaded a")\n'
            'G.add_edge("load_a", "a_df")\n'
            'G.add_node("stray_table", node_type="data", description="never connected")\n'
            'nx.write_graphml(G, "solution_graph.graphml")\n'
            "```\n"
        ),
    }
    for name, content in variants.items():
        directory = FIXTURES / "cassettes" / name
        if directory.exists():
            shutil.rmtree(directory)
        store = CassetteStore(directory)
        store.put(
            Cassette(
                key=canonical_key(request),
                request_canonical=canonical_request_json(request),
                response=ChatResponse(content=content, finish_reason="stop"),
                recorded_at=RECORDED_AT,
            )
        )
        print(f"wrote failure variant {name}")


def build_canonical_key_goldens() -> None:
    """50 deterministic requests and their keys, for cross-platform checks."""
    entries = []
    for i in range(50):
        temperature = (i % 5) / 4.0
        max_tokens = None if i % 3 == 0 else 256 + i
        content = (
            f"fixture request {i}\n"
            f"unicode: café π 地图 🌍\n"
            f"braces and quotes: {{'k': \"v{i}\"}}\n"
            + "line\n" * (i % 4)
        )
        request = user_request(
            content,
            model=f"model-{i % 2}",
            stage_tag=["graph", "operation", "assembly"][i % 3],
            temperature=temperature,
            max_tokens=max_tokens,
        )
        entries.append(
            {
                "model": request.model,
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
                "content": content,
                "key": canonical_key(request),
            }
        )
    target = FIXTURES / "canonical_keys.json"
    target.write_text(json.dumps(entries, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} canonical key goldens")


def copy_task_file() -> None:
    (FIXTURES / "case1_task.txt").write_text(case_task_text("case1"), encoding="utf-8", newline="")


def main() -> None:
    copy_task_file()
    build_case1(FIXTURES / "cassettes" / "case1")
    build_failure_variants()
    build_canonical_key_goldens()
    print("all fixtures rebuilt")


if __name__ == "__main__":
    main()
