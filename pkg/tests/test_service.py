"""HTTP API behavior via an in-process test client."""

import json
import logging

import pytest
from fastapi.testclient import TestClient

from procomplete import (
    MODE_TASKS_ONLY,
    MODE_WITH_GATEWAYS,
    EmbedderDescriptor,
    HashEmbedder,
    ProviderUnavailableError,
    build_index,
    save_index,
    to_bpmn_xml,
)
from procomplete.service import build_provider_for, create_app, load_indexes
from conftest import admissions_nodes_flows, make_graph


@pytest.fixture(scope="module")
def provider():
    return HashEmbedder(dimension=512)


@pytest.fixture(scope="module")
def admissions():
    nodes, flows = admissions_nodes_flows()
    return make_graph("admissions", nodes, flows)


@pytest.fixture(scope="module")
def indexes(admissions, provider):
    return {
        MODE_WITH_GATEWAYS: build_index([admissions], 3, provider),
        MODE_TASKS_ONLY: build_index([admissions], 3, provider, mode=MODE_TASKS_ONLY),
    }


@pytest.fixture(scope="module")
def client(indexes, provider):
    app = create_app(indexes, provider)
    with TestClient(app, raise_server_exceptions=False) as tc:
        yield tc


@pytest.fixture(scope="module")
def xml(admissions):
    return to_bpmn_xml(admissions).decode("utf-8")


def post(client, xml, **overrides):
    body = {"bpmn_xml": xml, "task_id": "ev", "user_id": "tester"}
    body.update(overrides)
    return client.post("/v1/recommendations", json=body)


# --------------------------------------------------------------------------
# happy paths


def test_health(client):
    r = client.get("/v1/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert set(body["indexes"]) == {MODE_WITH_GATEWAYS, MODE_TASKS_ONLY}
    info = body["indexes"][MODE_WITH_GATEWAYS]
    assert info["slice_length"] == 3
    assert info["records"] == 9
    assert info["embedder"] == {"id": "hash-v1", "dimension": 512}


def test_recommendations_success(client, xml):
    r = post(client, xml)
    assert r.status_code == 200
    body = r.json()
    assert "request_id" in body and body["latency_ms"] >= 0
    recs = body["recommendations"]
    assert recs[0]["type"] == {"kind": "ExclusiveGateway"}
    assert recs[0]["label"] is None
    assert recs[0]["score"] == pytest.approx(1.0, abs=1e-9)
    expl = recs[0]["explanation"]
    assert expl["matched_slice_text"] == (
        "Start Event. Task: Check documents. Task: Evaluate."
    )
    assert expl["source_process_id"] == "admissions"
    assert expl["similarity"] == recs[0]["score"]


def test_k_defaults_and_limits(client, xml):
    default = post(client, xml).json()["recommendations"]
    assert len(default) <= 3
    one = post(client, xml, k=1).json()["recommendations"]
    assert len(one) == 1


def test_filtered_flag(client, xml):
    recs = post(client, xml, filtered=True).json()["recommendations"]
    assert recs
    assert all(r["type"]["kind"] not in ("ExclusiveGateway", "EndEvent") for r in recs)


def test_tasks_only_mode(client, xml):
    recs = post(client, xml, mode=MODE_TASKS_ONLY).json()["recommendations"]
    labels = {r["label"] for r in recs[:2]}
    assert labels == {"Invite to an aptitude test", "Keep in the applicant pool"}


def test_multi_process_document(client):
    multi = """<definitions>
      <process id="p1">
        <task id="a" name="First"/><task id="b" name="Second"/><task id="c" name="Third"/>
        <sequenceFlow id="f1" sourceRef="a" targetRef="b"/>
        <sequenceFlow id="f2" sourceRef="b" targetRef="c"/>
      </process>
      <process id="p2">
        <task id="x" name="Left"/><task id="y" name="Right"/><task id="z" name="Done"/>
        <sequenceFlow id="g1" sourceRef="x" targetRef="y"/>
        <sequenceFlow id="g2" sourceRef="y" targetRef="z"/>
      </process>
    </definitions>"""
    r = post(client, multi, task_id="z")
    # the task lives in the second process; resolution must not stop at p1
    assert r.status_code in (200, 422)
    assert r.status_code != 404


# --------------------------------------------------------------------------
# error paths


def test_malformed_bpmn(client):
    r = post(client, "<definitions><process id='p'>")
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "malformed_bpmn"
    r = post(client, "<definitions/>")
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "malformed_bpmn"
    assert "request_id" in r.json()


def test_invalid_request(client, xml):
    r = post(client, xml, k=0)
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "invalid_request"
    r = client.post("/v1/recommendations", json={"task_id": "ev", "user_id": "u"})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "invalid_request"
    r = post(client, xml, mode="everything")
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "invalid_request"


def test_task_not_found(client, xml):
    r = post(client, xml, task_id="ghost")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "task_not_found"
    # a gateway id vanishes under tasks-only contraction
    r = post(client, xml, task_id="g1", mode=MODE_TASKS_ONLY)
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "task_not_found"


def test_no_slices(client, xml):
    r = post(client, xml, task_id="s")
    assert r.status_code == 422
    assert r.json()["error"]["code"] == "no_slices"


def test_mode_not_loaded(indexes, provider, xml):
    app = create_app({MODE_WITH_GATEWAYS: indexes[MODE_WITH_GATEWAYS]}, provider)
    with TestClient(app, raise_server_exceptions=False) as tc:
        r = post(tc, xml, mode=MODE_TASKS_ONLY)
    assert r.status_code == 409
    assert r.json()["error"]["code"] == "mode_not_loaded"


class _BrokenProvider:
    def __init__(self, descriptor, exc):
        self.descriptor = descriptor
        self._exc = exc

    def embed(self, text):
        raise self._exc

    def embed_batch(self, texts):
        raise self._exc


def test_provider_unavailable(indexes, xml):
    broken = _BrokenProvider(
        EmbedderDescriptor("hash-v1", 512), ProviderUnavailableError("down")
    )
    app = create_app({MODE_WITH_GATEWAYS: indexes[MODE_WITH_GATEWAYS]}, broken)
    with TestClient(app, raise_server_exceptions=False) as tc:
        r = post(tc, xml)
    assert r.status_code == 503
    assert r.json()["error"]["code"] == "provider_unavailable"


def test_internal_error(indexes, xml):
    exploding = _BrokenProvider(
        EmbedderDescriptor("hash-v1", 512), RuntimeError("bug")
    )
    app = create_app({MODE_WITH_GATEWAYS: indexes[MODE_WITH_GATEWAYS]}, exploding)
    with TestClient(app, raise_server_exceptions=False) as tc:
        r = post(tc, xml)
    assert r.status_code == 500
    assert r.json()["error"]["code"] == "internal_error"
    assert "bug" not in r.json()["error"]["message"]  # no detail leaks


# --------------------------------------------------------------------------
# startup validation


def test_create_app_validation(indexes, provider):
    with pytest.raises(ValueError):
        create_app({}, provider)
    with pytest.raises(ValueError):
        create_app({"bogus-mode": indexes[MODE_WITH_GATEWAYS]}, provider)
    with pytest.raises(ValueError):
        create_app({MODE_TASKS_ONLY: indexes[MODE_WITH_GATEWAYS]}, provider)
    with pytest.raises(ValueError):
        create_app(
            {MODE_WITH_GATEWAYS: indexes[MODE_WITH_GATEWAYS]},
            HashEmbedder(dimension=64),
        )


def test_load_indexes_and_provider(tmp_path, indexes):
    paths = []
    for mode, index in indexes.items():
        p = tmp_path / f"{mode}.jsonl"
        save_index(index, p)
        paths.append(str(p))
    loaded = load_indexes(paths)
    assert set(loaded) == {MODE_WITH_GATEWAYS, MODE_TASKS_ONLY}
    provider = build_provider_for(loaded)
    assert provider.descriptor == EmbedderDescriptor("hash-v1", 512)
    with pytest.raises(ValueError):
        load_indexes([paths[0], paths[0]])  # same mode twice


# --------------------------------------------------------------------------
# request logging


def test_requests_logged_as_jsonl(client, xml, caplog):
    with caplog.at_level(logging.INFO, logger="procomplete.service"):
        ok = post(client, xml)
        bad = post(client, xml, task_id="ghost")
    lines = [json.loads(r.message) for r in caplog.records]
    assert len(lines) == 2
    assert lines[0]["status"] == 200
    assert lines[0]["user_id"] == "tester"
    assert lines[0]["request_id"] == ok.json()["request_id"]
    assert lines[0]["latency_ms"] >= 0
    assert lines[1]["status"] == 404
    assert lines[1]["request_id"] == bad.json()["request_id"]
