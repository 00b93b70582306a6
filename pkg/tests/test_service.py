"""HTTP API contract tests via the in-process test client."""

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import guilget
from guilget.geometry import BBox
from guilget.graph import parse_ag
from guilget.metrics import PlacedLayout, alignment, ccs, cpi, gui_agc
from guilget.model.config import ModelConfig
from guilget.model.stages import GuilgetModel
from guilget.service import create_app

GRAPH = {
    "components": [
        {"id": 1, "class": "CONTAINER"},
        {"id": 2, "class": "BUTTON"},
        {"id": 3, "class": "TEXT"},
    ],
    "relations": [
        {"s": 2, "p": "inside", "o": 1},
        {"s": 2, "p": "above", "o": 3},
    ],
}


@pytest.fixture(scope="module")
def client():
    model = GuilgetModel(ModelConfig(d_model=32, ffn_dim=48, n_mixtures=2), seed=0)
    app = create_app(model)
    return TestClient(app, raise_server_exceptions=False)


class TestHealthAndVocab:
    def test_health(self, client):
        res = client.get("/api/health")
        assert res.status_code == 200
        assert res.json() == {"status": "ok", "version": guilget.__version__}

    def test_vocab(self, client):
        doc = client.get("/api/vocab").json()
        assert len(doc["classes"]) == 24
        assert {c["name"] for c in doc["classes"]} >= {"BUTTON", "CONTAINER", "TOOLBAR"}
        assert all(set(c) == {"id", "name", "container"} for c in doc["classes"])
        assert doc["predicates"] == ["left", "right", "above", "below", "inside"]


class TestGenerate:
    def test_layout_shape_and_metrics(self, client):
        res = client.post(
            "/api/generate",
            json={"graph": GRAPH, "samples": 3, "temperature": 0.5, "seed": 9},
        )
        assert res.status_code == 200
        layouts = res.json()["layouts"]
        assert len(layouts) == 3
        for layout in layouts:
            assert {b["id"] for b in layout["boxes"]} == {1, 2, 3}
            for box in layout["boxes"]:
                assert set(box) == {"id", "class", "x", "y", "w", "h"}
            assert set(layout["metrics"]) == {"gui_agc", "cpi", "ccs", "alignment"}

    def test_seeded_requests_reproducible(self, client):
        body = {"graph": GRAPH, "samples": 2, "temperature": 0.8, "seed": 4}
        a = client.post("/api/generate", json=body).json()
        b = client.post("/api/generate", json=body).json()
        assert a == b

    def test_metrics_match_library(self, client):
        body = {"graph": GRAPH, "samples": 1, "temperature": 0.0, "seed": 1}
        layout = client.post("/api/generate", json=body).json()["layouts"][0]
        graph = parse_ag(GRAPH)
        boxes = {b["id"]: BBox(b["x"], b["y"], b["w"], b["h"]) for b in layout["boxes"]}
        placed = PlacedLayout.from_generated(graph, boxes)
        assert layout["metrics"]["gui_agc"] == pytest.approx(gui_agc([(graph, boxes)]))
        assert layout["metrics"]["cpi"] == pytest.approx(cpi([placed]))
        assert layout["metrics"]["ccs"] == pytest.approx(ccs([placed]))
        assert layout["metrics"]["alignment"] == pytest.approx(alignment([placed]))

    def test_too_many_samples_is_422(self, client):
        res = client.post("/api/generate", json={"graph": GRAPH, "samples": 17})
        assert res.status_code == 422
        err = res.json()["error"]
        assert err["code"] == "validation_error"

    def test_invalid_graph_is_400(self, client):
        bad = {"components": [{"id": 1, "class": "BUTTON"}], "relations": [{"s": 1, "p": "left", "o": 2}]}
        res = client.post("/api/generate", json={"graph": bad, "samples": 1})
        assert res.status_code == 400
        err = res.json()["error"]
        assert err["code"] == "invalid_graph"
        assert "unknown instance" in err["message"]

    def test_unseeded_requests_allowed(self, client):
        res = client.post("/api/generate", json={"graph": GRAPH, "samples": 1})
        assert res.status_code == 200


class TestMetricsEndpoint:
    def test_roundtrip_values(self, client):
        layout = {
            "boxes": [
                {"id": 1, "x": 0.0, "y": 0.0, "w": 1.0, "h": 1.0},
                {"id": 2, "x": 0.1, "y": 0.1, "w": 0.2, "h": 0.2},
                {"id": 3, "x": 0.1, "y": 0.6, "w": 0.2, "h": 0.2},
            ]
        }
        res = client.post("/api/metrics", json={"graph": GRAPH, "layout": layout})
        assert res.status_code == 200
        doc = res.json()
        assert doc["gui_agc"] == 1.0  # both relations hold
        assert doc["cpi"] == 1.0

    def test_unknown_instance_rejected(self, client):
        layout = {"boxes": [{"id": 99, "x": 0, "y": 0, "w": 1, "h": 1}]}
        res = client.post("/api/metrics", json={"graph": GRAPH, "layout": layout})
        assert res.status_code == 400
        assert res.json()["error"]["code"] == "invalid_layout"

    def test_malformed_layout_rejected(self, client):
        res = client.post("/api/metrics", json={"graph": GRAPH, "layout": {"nope": []}})
        assert res.status_code == 400
        assert res.json()["error"]["code"] == "invalid_layout"


class TestStaticMount:
    def test_serves_index(self, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>studio</body></html>")
        model = GuilgetModel(ModelConfig(d_model=32, ffn_dim=48, n_mixtures=2), seed=0)
        client = TestClient(create_app(model, static_dir=str(tmp_path)))
        res = client.get("/")
        assert res.status_code == 200
        assert "studio" in res.text
        assert client.get("/api/health").status_code == 200


class TestStudioContract:
    """The document the studio editor serializes is accepted verbatim."""

    FIXTURE = (
        Path(__file__).resolve().parent.parent
        / "frontend"
        / "tests"
        / "fixtures"
        / "roundtrip-graph.json"
    )

    @pytest.mark.skipif(not FIXTURE.exists(), reason="studio fixture not present")
    def test_editor_fixture_accepted_and_generates(self, client):
        graph = json.loads(self.FIXTURE.read_text())
        res = client.post(
            "/api/generate",
            json={"graph": graph, "samples": 3, "temperature": 0.5, "seed": 11},
        )
        assert res.status_code == 200
        layouts = res.json()["layouts"]
        assert len(layouts) == 3
        for layout in layouts:
            assert {b["id"] for b in layout["boxes"]} == {1, 2, 3, 4, 5}
