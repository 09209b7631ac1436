"""Shared fixtures: the banana trade sample project and small networks."""

from __future__ import annotations

from pathlib import Path

import pytest

from odflow.model import (
    ColorSpec,
    Datasets,
    FlowRecord,
    JoinSpec,
    LayerStyle,
    LegendSpec,
    MapSettings,
    NodeRecord,
    ProjectFile,
    ScalingSpec,
    StrokeSpec,
    build_network,
)
from odflow.projections import ProjectionSpec

DATA_DIR = Path(__file__).parent / "data"

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: list[tuple[str, str]] = []


def record_criterion(name: str, status: str) -> None:
    ACCEPTANCE.append((name, status))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {name}")


def data_text(name: str) -> str:
    return (DATA_DIR / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def banana_nodes_csv() -> str:
    return data_text("banana_nodes.csv")


@pytest.fixture(scope="session")
def banana_flows_csv() -> str:
    return data_text("banana_flows.csv")


@pytest.fixture(scope="session")
def banana_attributes_csv() -> str:
    return data_text("banana_attributes.csv")


@pytest.fixture(scope="session")
def banana_regions_geojson() -> str:
    return data_text("banana_regions.geojson")


NODE_VOLUME_FIELD = "Total_Flow_Tons (Imports-Exports)"


def make_banana_project() -> ProjectFile:
    return ProjectFile(
        datasets=Datasets(
            nodes_csv=data_text("banana_nodes.csv"),
            flows_csv=data_text("banana_flows.csv"),
            regions_geojson=data_text("banana_regions.geojson"),
            attributes_csv=data_text("banana_attributes.csv"),
        ),
        joins=JoinSpec(
            node_id_field="Country_ID",
            node_x_field="X",
            node_y_field="Y",
            flow_origin_field="From_Country_ID",
            flow_dest_field="To_Country_ID",
            flow_value_field="Value",
            node_volume_field=NODE_VOLUME_FIELD,
            region_id_property="CntryCode",
            attribute_id_field="Country_ID",
            region_value_field="Net_Flow_Ratio",
        ),
        flows_style=LayerStyle(
            flow_style="teardrop",
            traffic_rule="right",
            scaling=ScalingSpec("classified", method="jenks", k=4),
            width_range=(1.0, 12.0),
            color=ColorSpec("classified", scheme="YlOrRd", k=4),
            stroke=StrokeSpec(rgb=(90, 90, 90), width=0.3),
            opacity=0.85,
            legend=LegendSpec(title="Banana trade (t)", decimals=0),
        ),
        nodes_style=LayerStyle(
            scaling=ScalingSpec("classified", method="jenks", k=3),
            width_range=(4.0, 10.0),
            color=ColorSpec("single", rgb=(60, 60, 60)),
            stroke=StrokeSpec(rgb=(255, 255, 255), width=1.0),
            opacity=0.9,
            legend=LegendSpec(title="Gross volume (t)", decimals=0),
        ),
        regions_style=LayerStyle(
            color=ColorSpec("classified", scheme="PRGn", k=5),
            stroke=StrokeSpec(rgb=(120, 120, 120), width=0.5),
            opacity=1.0,
            legend=LegendSpec(title="Net flow ratio", decimals=2),
        ),
        map=MapSettings(
            projection=ProjectionSpec.albers("SouthAmerica"),
            width=800.0,
            height=800.0,
            background=(255, 255, 255),
            title="Banana trade between countries in South America in 2019",
            north_arrow=True,
            projection_label=True,
            decimals=3,
        ),
    )


@pytest.fixture()
def banana_project() -> ProjectFile:
    return make_banana_project()


def make_four_flow_network():
    """A->B:4, B->A:2, A->C:1, C->A:3 on a small triangle of nodes."""
    nodes = [
        NodeRecord("A", 0.0, 0.0),
        NodeRecord("B", 10.0, 0.0),
        NodeRecord("C", 0.0, 10.0),
    ]
    flows = [
        FlowRecord("A", "B", 4.0),
        FlowRecord("B", "A", 2.0),
        FlowRecord("A", "C", 1.0),
        FlowRecord("C", "A", 3.0),
    ]
    return build_network(nodes, flows)


@pytest.fixture()
def four_flow_network():
    return make_four_flow_network()
