"""CLI and HTTP service behavior, including CLI/service byte equality."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from odflow.cli import main
from odflow.model import save_project
from odflow.scene import render_svg
from odflow.service import create_app

from conftest import make_banana_project

UNIT_SQUARE_GEOJSON = json.dumps({
    "type": "FeatureCollection",
    "features": [{
        "type": "Feature",
        "properties": {"id": "sq", "NAME": "Square"},
        "geometry": {"type": "Polygon",
                     "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]]},
    }],
})

ZERO_AREA_GEOJSON = json.dumps({
    "type": "FeatureCollection",
    "features": [{
        "type": "Feature",
        "properties": {"id": "degenerate"},
        "geometry": {"type": "Polygon",
                     "coordinates": [[[0, 0], [1, 1], [2, 2], [0, 0]]]},
    }],
})

FOUR_FLOW_CSV = "origin,dest,value\nA,B,4\nB,A,2\nA,C,1\nC,A,3\n"


@pytest.fixture()
def project_path(tmp_path):
    path = tmp_path / "banana.project.json"
    path.write_text(save_project(make_banana_project()), encoding="utf-8")
    return path


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "store")
    return TestClient(app)


# --- CLI ----------------------------------------------------------------------


def test_cli_render_banana(project_path, tmp_path, capsys):
    out = tmp_path / "map.svg"
    assert main(["render", str(project_path), "-o", str(out)]) == 0
    svg = out.read_bytes()
    assert svg.decode().count("data-origin") == 11
    assert svg == render_svg(make_banana_project())


def test_cli_render_missing_file(tmp_path, capsys):
    code = main(["render", str(tmp_path / "nope.json"), "-o", str(tmp_path / "o.svg")])
    assert code == 2
    assert "nope.json" in capsys.readouterr().err


def test_cli_render_bad_join(project_path, tmp_path, capsys):
    text = project_path.read_text().replace('"flow_value_field": "Value"',
                                            '"flow_value_field": "Volume"')
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    code = main(["render", str(bad), "-o", str(tmp_path / "o.svg")])
    assert code == 2
    assert "Volume" in capsys.readouterr().err


def test_cli_render_selection(project_path, tmp_path):
    out = tmp_path / "sel.svg"
    assert main(["render", str(project_path), "-o", str(out), "--selection", "9"]) == 0
    assert out.read_bytes() == render_svg(make_banana_project(), selection="9")


def test_cli_poly2points_unit_square(tmp_path):
    src = tmp_path / "sq.geojson"
    src.write_text(UNIT_SQUARE_GEOJSON)
    out = tmp_path / "pts.csv"
    assert main(["tools", "poly2points", str(src), "-o", str(out),
                 "--id-property", "id"]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("id,X,Y")
    cells = lines[1].split(",")
    assert cells[0] == "sq" and float(cells[1]) == 0.5 and float(cells[2]) == 0.5


def test_cli_poly2points_banana(tmp_path):
    out = tmp_path / "pts.csv"
    src = "tests/data/banana_regions.geojson"
    assert main(["tools", "poly2points", src, "-o", str(out),
                 "--id-property", "CntryCode"]) == 0
    assert len(out.read_text().strip().splitlines()) == 10  # header + 9 rows


def test_cli_poly2points_zero_area(tmp_path, capsys):
    src = tmp_path / "bad.geojson"
    src.write_text(ZERO_AREA_GEOJSON)
    code = main(["tools", "poly2points", str(src), "-o", str(tmp_path / "o.csv")])
    assert code == 2
    assert "zero total area" in capsys.readouterr().err


def test_cli_normalize_adjusted(tmp_path):
    flows = tmp_path / "flows.csv"
    flows.write_text(FOUR_FLOW_CSV)
    out = tmp_path / "mod.csv"
    assert main(["tools", "normalize", "--flows", str(flows),
                 "--model", "adjusted-paper", "-o", str(out)]) == 0
    rows = {ln.split(",")[0] + ">" + ln.split(",")[1]: ln.split(",")
            for ln in out.read_text().strip().splitlines()[1:]}
    assert float(rows["A>B"][4]) == 2.75


def test_cli_normalize_identity_fixture(tmp_path):
    flows = tmp_path / "flows.csv"
    flows.write_text("origin,dest,value\nA,B,4\n")
    out = tmp_path / "mod.csv"
    assert main(["tools", "normalize", "--flows", str(flows),
                 "--model", "adjusted-paper", "-o", str(out)]) == 0
    for line in out.read_text().strip().splitlines()[1:]:
        assert float(line.split(",")[4]) == 0.0


def test_cli_normalize_gravity_needs_geometry(tmp_path, capsys):
    flows = tmp_path / "flows.csv"
    flows.write_text(FOUR_FLOW_CSV)
    code = main(["tools", "normalize", "--flows", str(flows),
                 "--model", "gravity", "-o", str(tmp_path / "o.csv")])
    assert code == 2


def test_cli_normalize_gravity_with_distance_file(tmp_path):
    flows = tmp_path / "flows.csv"
    flows.write_text("origin,dest,value\nA,B,10\nB,A,10\n")
    dist = tmp_path / "dist.csv"
    dist.write_text("origin,dest,distance\nA,B,1\nB,A,1\n")
    out = tmp_path / "mod.csv"
    assert main(["tools", "normalize", "--flows", str(flows), "--model", "gravity",
                 "--distances", str(dist), "-o", str(out)]) == 0
    for line in out.read_text().strip().splitlines()[1:]:
        assert float(line.split(",")[4]) == 0.0


# --- service ---------------------------------------------------------------------


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_store_and_fetch_project(client):
    payload = save_project(make_banana_project()).encode()
    r = client.post("/projects", content=payload)
    assert r.status_code == 200
    pid = r.json()["id"]
    assert len(pid) == 64
    r2 = client.get(f"/projects/{pid}")
    assert r2.status_code == 200
    # stored bytes are the canonical serialization of what we posted
    assert r2.content == payload


def test_fetch_unknown_project(client):
    assert client.get("/projects/" + "0" * 64).status_code == 404
    assert client.get("/projects/not-an-id").status_code == 404


def test_render_inline_matches_cli(client, project_path, tmp_path):
    body = {"project": json.loads(project_path.read_text())}
    r = client.post("/render", json=body)
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("image/svg+xml")
    out = tmp_path / "cli.svg"
    assert main(["render", str(project_path), "-o", str(out)]) == 0
    assert r.content == out.read_bytes()


def test_render_by_id_and_selection(client):
    payload = save_project(make_banana_project()).encode()
    pid = client.post("/projects", content=payload).json()["id"]
    r = client.post("/render", json={"project_id": pid, "selection": "9"})
    assert r.status_code == 200
    assert r.content == render_svg(make_banana_project(), selection="9")


def test_render_requires_exactly_one_source(client, project_path):
    proj = json.loads(project_path.read_text())
    assert client.post("/render", json={}).status_code == 400
    assert client.post("/render", json={
        "project": proj, "project_id": "0" * 64}).status_code == 400


def test_render_unknown_id(client):
    assert client.post("/render", json={"project_id": "1" * 64}).status_code == 404


def test_render_invalid_project_structured_error(client):
    r = client.post("/render", json={"project": {"version": "1"}})
    assert r.status_code == 400
    body = r.json()
    assert body["error"] == "InputError"
    assert "detail" in body


def test_payload_limit(tmp_path):
    app = create_app(tmp_path / "store", max_body=1000)
    client = TestClient(app)
    r = client.post("/projects", content=b"x" * 2000)
    assert r.status_code == 413


def test_payload_limit_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ODFLOW_MAX_BODY", "500")
    client = TestClient(create_app(tmp_path / "store"))
    assert client.post("/projects", content=b"y" * 600).status_code == 413


def test_cli_render_decimals_flag(project_path, tmp_path):
    out1 = tmp_path / "d1.svg"
    out6 = tmp_path / "d6.svg"
    assert main(["render", str(project_path), "-o", str(out1), "--decimals", "1"]) == 0
    assert main(["render", str(project_path), "-o", str(out6), "--decimals", "6"]) == 0
    assert out1.read_bytes() != out6.read_bytes()
    assert main(["render", str(project_path), "-o", str(out1), "--decimals", "9"]) == 2


def test_tool_poly2points_endpoint(client):
    r = client.post("/tools/poly2points?id_property=id",
                    content=UNIT_SQUARE_GEOJSON.encode())
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("text/csv")
    line = r.text.strip().splitlines()[1]
    assert line.split(",")[0] == "sq"


def test_tool_normalize_endpoint(client):
    r = client.post("/tools/normalize", json={
        "flows_csv": FOUR_FLOW_CSV, "model": "adjusted-paper"})
    assert r.status_code == 200
    row = next(ln for ln in r.text.strip().splitlines() if ln.startswith("A,B"))
    assert float(row.split(",")[4]) == 2.75


def test_tool_normalize_validation(client):
    assert client.post("/tools/normalize", json={}).status_code == 400
    r = client.post("/tools/normalize", json={
        "flows_csv": FOUR_FLOW_CSV, "model": "gravity"})
    assert r.status_code == 400
