"""Protocol conformance: golden pairs, health behavior, error codes."""
import json
import math
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from mlorder_server.app import create_app
from mlorder_server.stub import StubCausalBackend, StubMaskedBackend

GOLDEN = sorted((Path(__file__).parent / "golden").glob("*.json"))


@pytest.fixture
def client():
    app = create_app(StubMaskedBackend(), StubCausalBackend(), "stub", "stub")
    return TestClient(app)


@pytest.fixture
def unloaded_client():
    return TestClient(create_app())


@pytest.mark.parametrize("golden_path", GOLDEN, ids=lambda p: p.stem)
def test_golden_roundtrip(client, golden_path):
    pair = json.loads(golden_path.read_text(encoding="utf-8"))
    resp = client.post(pair["request"]["path"], json=pair["request"]["body"])
    assert resp.status_code == 200
    # Bitwise identity after canonical serialization.
    assert json.dumps(resp.json(), sort_keys=True) == \
        json.dumps(pair["response"], sort_keys=True)


class TestHealth:
    def test_ok_when_loaded(self, client):
        resp = client.get("/v1/health")
        assert resp.status_code == 200
        assert resp.json() == {"status": "ok", "masked_model": "stub",
                               "causal_model": "stub"}

    def test_503_before_load(self, unloaded_client):
        assert unloaded_client.get("/v1/health").status_code == 503

    def test_unknown_path(self, client):
        assert client.get("/v1/nothing").status_code == 404


class TestMaskedEndpoint:
    def test_every_target_present(self, client):
        resp = client.post("/v1/score/masked", json={
            "words": ["uno", "dos", "tres", "cuatro"],
            "filled": [1],
            "targets": [0, 2, 3],
        })
        assert resp.status_code == 200
        logprobs = resp.json()["logprobs"]
        assert sorted(logprobs) == ["0", "2", "3"]
        assert all(math.isfinite(v) and v < 0 for v in logprobs.values())

    def test_determinism(self, client):
        body = {"words": ["la", "casa", "azul"], "filled": [2], "targets": [0, 1]}
        first = client.post("/v1/score/masked", json=body)
        second = client.post("/v1/score/masked", json=body)
        assert first.content == second.content

    def test_overlap_rejected(self, client):
        resp = client.post("/v1/score/masked", json={
            "words": ["a", "b"], "filled": [0], "targets": [0]})
        assert resp.status_code == 400

    def test_index_out_of_range(self, client):
        resp = client.post("/v1/score/masked", json={
            "words": ["a", "b"], "filled": [], "targets": [5]})
        assert resp.status_code == 400

    def test_malformed_body(self, client):
        resp = client.post("/v1/score/masked", json={"words": "not-a-list"})
        assert resp.status_code == 400

    def test_unencodable_word(self, client):
        resp = client.post("/v1/score/masked", json={
            "words": ["la", " "], "filled": [], "targets": [1]})
        assert resp.status_code == 422

    def test_503_before_load(self, unloaded_client):
        resp = unloaded_client.post("/v1/score/masked", json={
            "words": ["a", "b"], "filled": [], "targets": [0]})
        assert resp.status_code == 503


class TestCausalEndpoint:
    def test_one_entry_per_word(self, client):
        resp = client.post("/v1/score/causal", json={"words": ["solo"]})
        assert resp.status_code == 200
        assert len(resp.json()["logprobs"]) == 1

    def test_entries_nonpositive(self, client):
        resp = client.post("/v1/score/causal",
                           json={"words": ["El", "gato", "come."]})
        assert all(v <= 0 for v in resp.json()["logprobs"])

    def test_malformed_body(self, client):
        assert client.post("/v1/score/causal", json={}).status_code == 400
