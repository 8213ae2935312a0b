"""GraphML persistence for solution graphs.

Writing emits a fixed, byte-deterministic document: three string node
attributes (``node_type``, ``data_path``, ``description``), nodes in map
insertion order, edges in list order. Reading is tolerant: it accepts
documents from any writer (including NetworkX output produced by generated
code), ignores unknown attributes, and treats ``path`` as an alias for
``data_path``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from llmgeo.errors import LlmGeoError
from llmgeo.workflow.model import NodeAttrs, NodeType, SolutionGraph

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


class GraphMLParseError(LlmGeoError):
    code = "PARSE_ERROR"


class GraphMLSchemaError(LlmGeoError):
    code = "SCHEMA_ERROR"


_KEYS = (("d0", "node_type"), ("d1", "data_path"), ("d2", "description"))


def write_graphml(graph: SolutionGraph) -> bytes:
    """Serialize to UTF-8 GraphML; equal graphs give identical bytes."""
    out: list[str] = []
    out.append("<?xml version='1.0' encoding='utf-8'?>")
    out.append(f'<graphml xmlns="{GRAPHML_NS}">')
    for key_id, attr in _KEYS:
        out.append(f'  <key id="{key_id}" for="node" attr.name="{attr}" attr.type="string" />')
    out.append('  <graph edgedefault="directed">')
    for name, attrs in graph.nodes.items():
        out.append(f"    <node id={quoteattr(name)}>")
        values = (attrs.node_type.value, attrs.data_path, attrs.description)
        for (key_id, _), value in zip(_KEYS, values):
            out.append(f'      <data key="{key_id}">{escape(value)}</data>')
        out.append("    </node>")
    for src, dst in graph.edges:
        out.append(f"    <edge source={quoteattr(src)} target={quoteattr(dst)} />")
    out.append("  </graph>")
    out.append("</graphml>")
    out.append("")
    return "\n".join(out).encode("utf-8")


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def read_graphml(data: bytes | str) -> SolutionGraph:
    """Parse GraphML with string node attributes into a SolutionGraph.

    Raises ``GraphMLParseError`` for malformed XML and ``GraphMLSchemaError``
    when the document is XML but not a usable solution graph (no graph
    element, a node without ``node_type``, duplicate ids, dangling edges).
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8", errors="replace")
    else:
        text = data
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise GraphMLParseError(f"not well-formed GraphML: {exc}") from exc

    graph_el = None
    for el in root.iter():
        if _local(el.tag) == "graph":
            graph_el = el
            break
    if graph_el is None:
        raise GraphMLSchemaError("document has no <graph> element")

    # key id -> attribute name, from the <key> declarations
    attr_names: dict[str, str] = {}
    for el in root.iter():
        if _local(el.tag) == "key":
            key_id = el.get("id")
            name = el.get("attr.name")
            if key_id and name:
                attr_names[key_id] = name

    nodes: dict[str, NodeAttrs] = {}
    edges: list[tuple[str, str]] = []
    for el in graph_el:
        tag = _local(el.tag)
        if tag == "node":
            node_id = el.get("id")
            if node_id is None:
                raise GraphMLSchemaError("node element without id")
            if node_id in nodes:
                raise GraphMLSchemaError(f"duplicate node id {node_id!r}")
            values: dict[str, str] = {}
            for data_el in el:
                if _local(data_el.tag) != "data":
                    continue
                key_id = data_el.get("key", "")
                values[attr_names.get(key_id, key_id)] = data_el.text or ""
            node_type_raw = values.get("node_type")
            if node_type_raw is None:
                raise GraphMLSchemaError(f"node {node_id!r} has no node_type attribute")
            try:
                node_type = NodeType(node_type_raw)
            except ValueError:
                raise GraphMLSchemaError(
                    f"node {node_id!r} has unknown node_type {node_type_raw!r}"
                ) from None
            data_path = values.get("data_path", values.get("path", ""))
            if node_type is NodeType.OPERATION:
                data_path = ""
            nodes[node_id] = NodeAttrs(
                node_type=node_type,
                description=values.get("description", ""),
                data_path=data_path,
            )
        elif tag == "edge":
            src = el.get("source")
            dst = el.get("target")
            if src is None or dst is None:
                raise GraphMLSchemaError("edge element without source/target")
            edges.append((src, dst))

    try:
        return SolutionGraph(nodes=nodes, edges=edges)
    except ValueError as exc:
        raise GraphMLSchemaError(str(exc)) from exc
