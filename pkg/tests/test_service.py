import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from surgeflow.service import create_app

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
SCENARIO = str(DATA_DIR / "scenario.json")


def _wait_done(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/api/v1/jobs/{job_id}").json()
        if doc["state"] in ("done", "failed"):
            return doc
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} still {doc['state']}")


@pytest.fixture()
def client(tmp_path):
    app = create_app(scenario_path=SCENARIO, data_root=str(tmp_path))
    with TestClient(app) as c:
        yield c


@pytest.fixture()
def dataset_id(client):
    docs = client.get("/api/v1/datasets").json()["datasets"]
    assert len(docs) == 1
    return docs[0]["id"]


class TestDatasets:
    def test_bundled_dataset_listed(self, client):
        doc = client.get("/api/v1/datasets").json()
        assert doc["schema_version"] == 1
        assert len(doc["datasets"]) == 1

    def test_upload_round_trip_same_content_same_id(self, client, dataset_id):
        files = [
            ("files", (name, (DATA_DIR / name).read_bytes(), "text/csv"))
            for name in ("locations.csv", "capacity.csv", "admissions.csv",
                         "census.csv", "nurses.csv")
        ]
        scenario = ("scenario.json", (DATA_DIR / "scenario.json").read_bytes(),
                    "application/json")
        r = client.post("/api/v1/datasets", files=files + [("scenario", scenario)])
        assert r.status_code == 201
        assert r.json()["dataset_id"] == dataset_id

    def test_invalid_dataset_rejected(self, client):
        files = [("files", ("locations.csv", b"id,name\nonly,two\n", "text/csv"))]
        scenario = (
            "scenario.json",
            json.dumps({"start_date": "2020-04-01", "end_date": "2020-04-03"}).encode(),
            "application/json",
        )
        r = client.post("/api/v1/datasets", files=files + [("scenario", scenario)])
        assert r.status_code == 400

    def test_unexpected_filename_rejected(self, client):
        files = [("files", ("evil.csv", b"x\n", "text/csv"))]
        scenario = ("scenario.json", b"{}", "application/json")
        r = client.post("/api/v1/datasets", files=files + [("scenario", scenario)])
        assert r.status_code == 400


class TestJobs:
    def test_full_job_lifecycle(self, client, dataset_id):
        r = client.post("/api/v1/jobs", json={"dataset_id": dataset_id})
        assert r.status_code == 202
        job_id = r.json()["job_id"]
        doc = _wait_done(client, job_id)
        assert doc["state"] == "done"
        result = client.get(f"/api/v1/jobs/{job_id}/result")
        assert result.status_code == 200
        body = result.json()
        assert body["schema_version"] == 1
        assert 0.0 <= body["metrics"]["overflow_reduction"] <= 1.0
        assert body["transfers"] and body["census"] and body["baseline_census"]
        assert "active" in body["baseline_census"][0]

    def test_duplicate_submission_reuses_job(self, client, dataset_id):
        a = client.post("/api/v1/jobs", json={"dataset_id": dataset_id}).json()["job_id"]
        b = client.post("/api/v1/jobs", json={"dataset_id": dataset_id}).json()["job_id"]
        assert a == b
        c = client.post(
            "/api/v1/jobs", json={"dataset_id": dataset_id, "overrides": {"robust": {"gamma": 1.0, "enabled": True}}}
        ).json()["job_id"]
        assert c != a

    def test_unknown_dataset_404(self, client):
        r = client.post("/api/v1/jobs", json={"dataset_id": "nope"})
        assert r.status_code == 404

    def test_bad_override_400_names_field(self, client, dataset_id):
        r = client.post(
            "/api/v1/jobs",
            json={
                "dataset_id": dataset_id,
                "overrides": {"robust": {"gamma": 99.0, "enabled": True}},
            },
        )
        assert r.status_code == 400
        assert "gamma" in r.json()["detail"]

    def test_result_conflict_before_done(self, client, dataset_id):
        job_id = client.post("/api/v1/jobs", json={"dataset_id": dataset_id}).json()["job_id"]
        r = client.get(f"/api/v1/jobs/{job_id}/result")
        assert r.status_code in (200, 409)  # depends on worker timing
        _wait_done(client, job_id)

    def test_unknown_job_404(self, client):
        assert client.get("/api/v1/jobs/zzz").status_code == 404
        assert client.get("/api/v1/jobs/zzz/result").status_code == 404


class TestPersistence:
    def test_restart_recovers_done_jobs(self, tmp_path):
        app = create_app(scenario_path=SCENARIO, data_root=str(tmp_path))
        with TestClient(app) as c:
            dataset = c.get("/api/v1/datasets").json()["datasets"][0]["id"]
            job_id = c.post("/api/v1/jobs", json={"dataset_id": dataset}).json()["job_id"]
            _wait_done(c, job_id)
            before = c.get(f"/api/v1/jobs/{job_id}/result").json()
        app2 = create_app(scenario_path=SCENARIO, data_root=str(tmp_path))
        with TestClient(app2) as c2:
            doc = c2.get(f"/api/v1/jobs/{job_id}").json()
            assert doc["state"] == "done"
            after = c2.get(f"/api/v1/jobs/{job_id}/result").json()
            assert after == before

    def test_restart_fails_in_flight_jobs(self, tmp_path):
        # simulate a crash mid-run by persisting a queued job file directly
        app = create_app(scenario_path=SCENARIO, data_root=str(tmp_path))
        with TestClient(app) as c:
            dataset = c.get("/api/v1/datasets").json()["datasets"][0]["id"]
        job_dir = tmp_path / "results" / "deadbeef0000"
        job_dir.mkdir(parents=True)
        (job_dir / "job.json").write_text(json.dumps({
            "job_id": "deadbeef0000",
            "dataset_id": dataset,
            "overrides": {},
            "fingerprint": "x",
            "state": "running",
            "note": "solving",
        }))
        app2 = create_app(scenario_path=SCENARIO, data_root=str(tmp_path))
        with TestClient(app2) as c2:
            doc = c2.get("/api/v1/jobs/deadbeef0000").json()
            assert doc["state"] == "failed"
            assert "restart" in doc["error"]


class TestDeterminismAcrossInterfaces:
    def test_service_metrics_match_cli_bundle(self, client, dataset_id, tmp_path):
        from surgeflow.cli import run_cli

        job_id = client.post("/api/v1/jobs", json={"dataset_id": dataset_id}).json()["job_id"]
        _wait_done(client, job_id)
        service_metrics = client.get(f"/api/v1/jobs/{job_id}/result").json()["metrics"]
        out = tmp_path / "cli"
        assert run_cli(["solve", "--scenario", SCENARIO, "--out", str(out)]) == 0
        cli_metrics = json.loads((out / "metrics.json").read_text())
        assert service_metrics == cli_metrics
