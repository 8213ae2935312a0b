from __future__ import annotations

from pathlib import Path

import pytest

from llmgeo.workflow.model import NodeAttrs, NodeType, SolutionGraph


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion, printed after the run."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::test_criterion_", 1)[1].replace("_", " ")
            lines.append((name, outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, outcome in sorted(lines):
            terminalreporter.write_line(f"  {name}: {'PASS' if outcome == 'PASSED' else 'FAIL'}")

REPO_ROOT = Path(__file__).resolve().parents[1]
FIXTURES = REPO_ROOT / "fixtures"
SHIM = REPO_ROOT / "shim" / "runtime_shim.py"


def build_case1_graph() -> SolutionGraph:
    """The hazardous-waste case solution graph: 9 data + 6 operation nodes, 15 edges."""
    nodes: dict[str, NodeAttrs] = {}
    edges: list[tuple[str, str]] = []

    def data(name: str, desc: str, path: str = "") -> None:
        nodes[name] = NodeAttrs(node_type=NodeType.DATA, description=desc, data_path=path)

    def op(name: str, desc: str) -> None:
        nodes[name] = NodeAttrs(node_type=NodeType.OPERATION, description=desc)

    data(
        "haz_waste_shp_url",
        "Hazardous waste facility shapefile URL",
        "https://github.com/gladcolor/LLM-Geo/raw/master/overlay_analysis/Hazardous_Waste_Sites.zip",
    )
    op("load_haz_waste_shp", "Load hazardous waste facility shapefile")
    edges.append(("haz_waste_shp_url", "load_haz_waste_shp"))
    data("haz_waste_gdf", "Hazardous waste facility GeoDataFrame")
    edges.append(("load_haz_waste_shp", "haz_waste_gdf"))

    data(
        "nc_tract_shp_url",
        "NC tract boundary shapefile URL",
        "https://github.com/gladcolor/LLM-Geo/raw/master/overlay_analysis/tract_shp_37.zip",
    )
    op("load_nc_tract_shp", "Load NC tract boundary shapefile")
    edges.append(("nc_tract_shp_url", "load_nc_tract_shp"))
    data("nc_tract_gdf", "NC tract boundary GeoDataFrame")
    edges.append(("load_nc_tract_shp", "nc_tract_gdf"))

    data(
        "nc_tract_pop_csv_url",
        "NC tract population CSV file URL",
        "https://github.com/gladcolor/LLM-Geo/raw/master/overlay_analysis/NC_tract_population.csv",
    )
    op("load_nc_tract_pop_csv", "Load NC tract population CSV file")
    edges.append(("nc_tract_pop_csv_url", "load_nc_tract_pop_csv"))
    data("nc_tract_pop_df", "NC tract population DataFrame")
    edges.append(("load_nc_tract_pop_csv", "nc_tract_pop_df"))

    op("join_tract_pop", "Join tract GeoDataFrame with population DataFrame")
    edges.append(("nc_tract_pop_df", "join_tract_pop"))
    edges.append(("nc_tract_gdf", "join_tract_pop"))
    data("nc_tract_pop_gdf", "NC tract GeoDataFrame with population")
    edges.append(("join_tract_pop", "nc_tract_pop_gdf"))

    op(
        "calculate_pop_within_tracts",
        "Calculate total population within tracts containing hazardous waste facilities",
    )
    edges.append(("nc_tract_pop_gdf", "calculate_pop_within_tracts"))
    edges.append(("haz_waste_gdf", "calculate_pop_within_tracts"))
    data(
        "total_pop_within_tracts",
        "Total population within tracts containing hazardous waste facilities",
    )
    edges.append(("calculate_pop_within_tracts", "total_pop_within_tracts"))

    op(
        "generate_map",
        "Generate the map showing spatial distribution of population and highlighting "
        "borders of tracts with hazardous waste facilities",
    )
    edges.append(("nc_tract_pop_gdf", "generate_map"))
    edges.append(("haz_waste_gdf", "generate_map"))
    data(
        "population_map",
        "Spatial distribution of population and highlighted borders of tracts with "
        "hazardous waste facilities",
    )
    edges.append(("generate_map", "population_map"))
    return SolutionGraph(nodes=nodes, edges=edges)


CASE1_TOPO = [
    "load_haz_waste_shp",
    "load_nc_tract_pop_csv",
    "load_nc_tract_shp",
    "join_tract_pop",
    "calculate_pop_within_tracts",
    "generate_map",
]


@pytest.fixture
def case1_graph() -> SolutionGraph:
    return build_case1_graph()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def shim_path() -> Path:
    assert SHIM.is_file(), f"bundled shim missing at {SHIM}"
    return SHIM


@pytest.fixture(scope="session")
def case1_cassettes(fixtures_dir: Path) -> Path:
    path = fixtures_dir / "cassettes" / "case1"
    if not path.is_dir():
        pytest.skip("case1 cassette fixtures not built yet (scripts/build_fixtures.py)")
    return path
