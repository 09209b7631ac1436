"""Network assembly, domain invariants and project round-trips."""

from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odflow.errors import DuplicateNodeId, InputError, UnknownNodeReference
from odflow.ingest import parse_flows_csv, parse_nodes_csv
from odflow.model import (
    FlowRecord,
    NodeRecord,
    build_network,
    load_project,
    save_project,
)

from conftest import make_banana_project


def test_node_record_validates_bounds():
    with pytest.raises(InputError):
        NodeRecord("x", -181.0, 0.0)
    with pytest.raises(InputError):
        NodeRecord("x", 0.0, 95.0)
    with pytest.raises(InputError):
        NodeRecord("", 0.0, 0.0)


def test_flow_record_requires_finite_value():
    with pytest.raises(InputError):
        FlowRecord("a", "b", float("nan"))
    FlowRecord("a", "b", -1.0)  # derived flows may be negative


def test_banana_network_total(banana_nodes_csv, banana_flows_csv):
    nodes = parse_nodes_csv(banana_nodes_csv, "Country_ID", "X", "Y")
    flows = parse_flows_csv(banana_flows_csv, "From_Country_ID", "To_Country_ID", "Value")
    net = build_network(nodes, flows)
    assert len(net.nodes) == 9
    assert len(net.flows) == 11
    assert net.total == 678924.0  # sum of the eleven listed values
    assert net.in_strength("9") == 433273.0
    assert net.out_strength("9") == 0.0


def test_empty_flow_list():
    net = build_network([NodeRecord("A", 0, 0), NodeRecord("B", 1, 1)], [])
    assert net.total == 0.0
    assert net.out_strength("A") == 0.0
    assert net.in_strength("B") == 0.0


def test_four_flow_strengths(four_flow_network):
    net = four_flow_network
    assert net.out_strength("A") == 5.0
    assert net.in_strength("A") == 5.0
    assert net.total == 10.0


def test_unknown_node_reference_lists_rows():
    nodes = [NodeRecord("A", 0, 0)]
    flows = [FlowRecord("A", "Z", 1.0), FlowRecord("Q", "A", 2.0)]
    with pytest.raises(UnknownNodeReference) as exc:
        build_network(nodes, flows)
    rows = exc.value.rows
    assert (1, "Z") in rows and (2, "Q") in rows


def test_duplicate_node_id():
    with pytest.raises(DuplicateNodeId):
        build_network([NodeRecord("A", 0, 0), NodeRecord("A", 1, 1)], [])


def test_build_network_from_mappings():
    nodes = [NodeRecord("1", 0, 0), NodeRecord("2", 1, 1)]
    rows = [{"from": "1", "to": "2", "qty": "7.5", "note": "x"}]
    net = build_network(nodes, rows, "from", "to", "qty")
    assert net.flows[0].value == 7.5
    assert net.flows[0].attributes["note"] == "x"


def test_build_network_mapping_non_numeric():
    nodes = [NodeRecord("1", 0, 0)]
    with pytest.raises(InputError):
        build_network(nodes, [{"from": "1", "to": "1", "qty": "many"}],
                      "from", "to", "qty")


@st.composite
def _flow_tables(draw):
    n_nodes = draw(st.integers(2, 6))
    ids = [f"n{i}" for i in range(n_nodes)]
    n_flows = draw(st.integers(0, 25))
    flows = [
        FlowRecord(
            draw(st.sampled_from(ids)),
            draw(st.sampled_from(ids)),
            draw(st.floats(0, 1e9, allow_nan=False, allow_infinity=False)),
        )
        for _ in range(n_flows)
    ]
    return ids, flows


@given(_flow_tables(), st.randoms())
@settings(max_examples=60, deadline=None)
def test_network_aggregates_are_order_insensitive(table, rnd):
    ids, flows = table
    nodes = [NodeRecord(i, 0, 0) for i in ids]
    net1 = build_network(nodes, flows)
    shuffled = list(flows)
    rnd.shuffle(shuffled)
    net2 = build_network(nodes, shuffled)
    assert net1.total == net2.total
    for i in ids:
        assert net1.out_strength(i) == net2.out_strength(i)
        assert net1.in_strength(i) == net2.in_strength(i)


@given(_flow_tables())
@settings(max_examples=60, deadline=None)
def test_network_marginals_are_exactly_rounded_sums(table):
    ids, flows = table
    nodes = [NodeRecord(i, 0, 0) for i in ids]
    net = build_network(nodes, flows)
    # fsum semantics: every stored aggregate equals the correctly rounded
    # exact sum, so the marginal identity holds at the rational level
    exact_out = {i: sum((Fraction(f.value) for f in flows if f.origin_id == i),
                        Fraction(0)) for i in ids}
    exact_in = {i: sum((Fraction(f.value) for f in flows if f.dest_id == i),
                       Fraction(0)) for i in ids}
    exact_total = sum((Fraction(f.value) for f in flows), Fraction(0))
    assert sum(exact_out.values(), Fraction(0)) == exact_total
    assert sum(exact_in.values(), Fraction(0)) == exact_total
    for i in ids:
        assert net.out_strength(i) == float(exact_out[i])
        assert net.in_strength(i) == float(exact_in[i])
    assert net.total == float(exact_total)


def test_integer_valued_marginals_sum_exactly(four_flow_network):
    net = four_flow_network
    assert math.fsum(net.out_strengths.values()) == net.total
    assert math.fsum(net.in_strengths.values()) == net.total


def test_project_json_round_trip():
    project = make_banana_project()
    text = save_project(project)
    again = load_project(text)
    assert save_project(again) == text
    assert again.datasets.nodes_csv == project.datasets.nodes_csv
    assert again.map.projection.preset == "SouthAmerica"
    assert again.flows_style.scaling.k == 4


def test_project_rejects_wrong_version():
    project = make_banana_project()
    text = save_project(project).replace('"version": "1"', '"version": "99"')
    with pytest.raises(InputError):
        load_project(text)


def test_project_rejects_missing_join_field():
    project = make_banana_project()
    text = save_project(project).replace('"node_x_field": "X"', '"node_x_field": "LONG"')
    with pytest.raises(InputError):
        load_project(text)


def test_project_rejects_garbage():
    with pytest.raises(InputError):
        load_project("{not json")
    with pytest.raises(InputError):
        load_project("[]")


def test_layer_style_validation():
    from odflow.model import LayerStyle, ScalingSpec

    with pytest.raises(InputError):
        LayerStyle(width_range=(5.0, 5.0))
    with pytest.raises(InputError):
        LayerStyle(opacity=1.5)
    with pytest.raises(InputError):
        LayerStyle(top_n=0)
    with pytest.raises(InputError):
        ScalingSpec("classified", method="manual", breaks=(3.0, 2.0))
    with pytest.raises(InputError):
        ScalingSpec("classified", method="jenks", k=12)
    manual = ScalingSpec("classified", method="manual", breaks=(1.0, 2.0, 5.0))
    assert manual.k == 4
