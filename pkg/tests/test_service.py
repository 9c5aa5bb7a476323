import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from debiaswb.config import AppConfig
from debiaswb.dataset import TabularDataset
from debiaswb.metrics import bias_report
from debiaswb.model import deserialize_model
from debiaswb.service import create_app
from debiaswb.session import FileSessionStore, SessionConfig

from .conftest import toy_csv, toy_schema

SESSION_CONFIG = {
    "model_params": {"n_trees": 8, "max_depth": 3, "min_samples_leaf": 2},
    "coverage_threshold": 20,
}


@pytest.fixture()
def client(tmp_path):
    config = AppConfig(data_dir=str(tmp_path / "data"))
    app = create_app(config)
    with TestClient(app) as c:
        resp = c.post("/api/session", json={
            "csv_text": toy_csv(n=260, seed=12).decode(),
            "variables": [s.to_dict() for s in toy_schema()],
            "config": SESSION_CONFIG,
        })
        assert resp.status_code == 200, resp.text
        c.data_dir = tmp_path / "data"
        yield c


AUGMENT_BODY = {
    "constraints": {
        "joint": True,
        "constraints": [{"variable": "age", "min": 55.0, "max": 85.0, "count": 30}],
    },
    "seed": 2,
}


def test_health_and_schema(client):
    assert client.get("/api/health").json()["status"] == "ok"
    schema = client.get("/api/schema").json()
    assert {v["name"] for v in schema["variables"]} == {"age", "bmi", "smoker", "risk"}
    assert len(schema["segments"]["age"]) == 3


def test_overview_fresh_session_has_zero_delta(client):
    body = client.get("/api/overview").json()
    assert body["accuracy_delta"] == 0.0
    assert body["history_length"] == 1
    assert body["pending_batch"] is None
    assert body["predictors"] == ["age", "bmi", "smoker"]


def test_variables_and_slice(client):
    full = client.get("/api/variables").json()
    assert set(full["variables"]) == {"age", "bmi", "smoker"}
    assert 0.0 < full["overall_rr"] <= 1.0
    one = client.get("/api/variables/age").json()
    assert one["variable"] == "age"
    assert one["segments"] == full["variables"]["age"]["segments"]
    missing = client.get("/api/variables/nope")
    assert missing.status_code == 422
    assert missing.json()["code"] == "schema_mismatch"


def test_quality_endpoint(client):
    body = client.get("/api/quality").json()
    assert set(body["severities"]) == {"outliers", "duplicates", "correlation", "skew", "imbalance"}
    assert 0.0 <= body["overall"] <= 1.0


def test_plan_then_generate_then_inspect(client):
    plan = client.post("/api/augment/plan", json={"constraints": AUGMENT_BODY["constraints"]}).json()
    assert plan["total_requested"] == 30
    batch = client.post("/api/augment", json=AUGMENT_BODY).json()
    assert batch["size"] == 30
    assert len(batch["rows"]) == 30
    assert all(55.0 <= r["cells"]["age"] <= 85.0 for r in batch["rows"])

    listing = client.get("/api/generated").json()
    assert listing["size"] == 30
    sorted_rows = client.get("/api/generated", params={"sort": "confidence:asc"}).json()["rows"]
    confs = [r["prediction"]["confidence"] for r in sorted_rows]
    assert confs == sorted(confs)

    filtered = client.get("/api/generated", params={"predicted": "high"}).json()["rows"]
    assert all(r["prediction"]["predicted_class"] == "high" for r in filtered)

    row_id = batch["rows"][0]["row_id"]
    single = client.get(f"/api/generated/{row_id}").json()
    assert single["row_id"] == row_id


def test_whatif_is_a_pure_preview(client):
    batch = client.post("/api/augment", json=AUGMENT_BODY).json()
    row_id = batch["rows"][0]["row_id"]
    before = batch["rows"][0]["cells"]["age"]
    resp = client.post("/api/whatif", json={"row_id": row_id, "variable": "age", "value": 70.0}).json()
    assert resp["prediction"]["confidence"] > 0
    after = client.get(f"/api/generated/{row_id}").json()["cells"]["age"]
    assert after == before


def test_edit_delete_and_discard(client):
    batch = client.post("/api/augment", json=AUGMENT_BODY).json()
    row_id = batch["rows"][0]["row_id"]
    edited = client.patch(f"/api/generated/{row_id}",
                          json={"variable": "age", "value": 66.0}).json()
    assert edited["prediction"]["predicted_class"] in ("low", "high")
    assert client.get(f"/api/generated/{row_id}").json()["cells"]["age"] == 66.0
    assert client.get(f"/api/generated/{row_id}").json()["provenance"] == "edited"

    second = batch["rows"][1]["row_id"]
    assert client.delete(f"/api/generated/{second}").json()["deleted"] == second
    assert client.get(f"/api/generated/{second}").status_code == 404

    assert client.delete("/api/generated").json()["discarded"] is True
    assert client.get("/api/generated").status_code == 404


def test_bulk_edit(client):
    batch = client.post("/api/augment", json=AUGMENT_BODY).json()
    ids = [r["row_id"] for r in batch["rows"][:3]]
    resp = client.patch("/api/generated", json={
        "edits": [{"row_id": rid, "variable": "bmi", "value": 27.5} for rid in ids],
        "request_id": "bulk-1",
    }).json()
    assert len(resp["edited"]) == 3
    for rid in ids:
        assert client.get(f"/api/generated/{rid}").json()["cells"]["bmi"] == 27.5


def test_retrain_requires_acknowledgement(client):
    client.post("/api/augment", json=AUGMENT_BODY)
    resp = client.post("/api/retrain", json={"acknowledged": False})
    assert resp.status_code == 409
    assert resp.json()["code"] == "acknowledgement_required"


def test_retrain_is_idempotent_per_request_id(client):
    client.post("/api/augment", json=AUGMENT_BODY)
    first = client.post("/api/retrain", json={"acknowledged": True, "request_id": "rt-1"}).json()
    second = client.post("/api/retrain", json={"acknowledged": True, "request_id": "rt-1"}).json()
    assert first["entry"]["index"] == second["entry"]["index"] == 1
    history = client.get("/api/history").json()["entries"]
    assert len(history) == 2


def test_drift_and_revert_flow(client):
    client.post("/api/augment", json=AUGMENT_BODY)
    drift = client.get("/api/drift").json()
    assert set(drift["per_variable"]) == {"age", "bmi", "smoker"}
    assert all(0.0 <= v <= 1.0 for v in drift["per_variable"].values())

    client.post("/api/retrain", json={"acknowledged": True})
    reverted = client.post("/api/revert", json={"index": 0}).json()
    assert reverted["entry"]["kind"] == "revert"
    assert reverted["entry"]["reverted_to"] == 0
    history = client.get("/api/history").json()["entries"]
    assert [e["kind"] for e in history] == ["baseline", "retrain", "revert"]
    bad = client.post("/api/revert", json={"index": 99})
    assert bad.status_code == 404


def test_full_loop_matches_engine_recomputation(client):
    """History RR/CR must equal fresh metric computation on the persisted
    snapshots (API and engine may not disagree)."""
    batch = client.post("/api/augment", json=AUGMENT_BODY).json()
    row_id = batch["rows"][0]["row_id"]
    client.patch(f"/api/generated/{row_id}", json={"variable": "age", "value": 70.0})
    client.post("/api/retrain", json={"acknowledged": True})
    entries = client.get("/api/history").json()["entries"]

    store = FileSessionStore(Path(client.data_dir) / "default")
    for entry in entries:
        dataset = TabularDataset.from_dict(
            json.loads(store.get_blob("datasets", entry["dataset_ref"])))
        model = deserialize_model(store.get_blob("models", entry["model_ref"]))
        report = bias_report(dataset, model, threshold=20)
        assert entry["overall_rr"] == pytest.approx(report.overall_rr, abs=1e-12)
        assert entry["overall_cr"] == pytest.approx(report.overall_cr, abs=1e-12)
        assert entry["accuracy"] == pytest.approx(model.heldout_accuracy, abs=1e-12)


def test_errors_are_structured(client):
    resp = client.post("/api/augment", json={
        "constraints": {"joint": True, "constraints": [
            {"variable": "age", "min": 1.0, "max": 2.0, "count": 10}]},
    })
    assert resp.status_code == 422
    body = resp.json()
    assert body["code"] == "constraint_out_of_domain"
    assert "message" in body


def test_unknown_session_is_404(tmp_path):
    app = create_app(AppConfig(data_dir=str(tmp_path / "empty")))
    with TestClient(app) as c:
        resp = c.get("/api/overview")
        assert resp.status_code == 404
        assert resp.json()["code"] == "unknown_session"


def test_static_token_guard(tmp_path):
    config = AppConfig(data_dir=str(tmp_path / "data"), api_token="hunter2")
    app = create_app(config)
    with TestClient(app) as c:
        assert c.get("/api/overview").status_code == 400
        ok = c.post("/api/session", headers={"Authorization": "Bearer hunter2"}, json={
            "csv_text": toy_csv(n=260, seed=12).decode(),
            "variables": [s.to_dict() for s in toy_schema()],
            "config": SESSION_CONFIG,
        })
        assert ok.status_code == 200
        assert c.get("/api/overview",
                     headers={"Authorization": "Bearer hunter2"}).status_code == 200


def test_bootstrap_from_config_files(tmp_path):
    csv_path = tmp_path / "d.csv"
    schema_path = tmp_path / "d.schema.json"
    csv_path.write_bytes(toy_csv(n=260, seed=12))
    schema_path.write_text(json.dumps([s.to_dict() for s in toy_schema()]))
    config = AppConfig(
        data_dir=str(tmp_path / "data"),
        dataset_csv=str(csv_path),
        dataset_schema=str(schema_path),
        session=SessionConfig.from_dict(SESSION_CONFIG),
    )
    app = create_app(config)
    with TestClient(app) as c:
        assert c.get("/api/overview").json()["history_length"] == 1
    # a second boot reuses the persisted session instead of re-ingesting
    app2 = create_app(config)
    with TestClient(app2) as c:
        assert c.get("/api/overview").json()["history_length"] == 1
