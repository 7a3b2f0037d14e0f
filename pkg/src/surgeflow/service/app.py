"""HTTP API: datasets, asynchronous scenario solves, and result bundles.

Jobs move queued -> running -> done | failed, at most two run at once,
and finished results are persisted to disk so they survive restarts.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
import os
import shutil
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pandas as pd
from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from ..dataio import (
    SCHEMA_VERSION,
    DataError,
    load_dataset,
    metrics_json,
    save_results,
    scenario_from_dict,
)
from ..pipeline import run_scenario

log = logging.getLogger("surgeflow.service")

DATASET_FILES = ["locations.csv", "capacity.csv", "admissions.csv", "census.csv", "nurses.csv"]
MAX_WORKERS = 2


class JobSubmission(BaseModel):
    dataset_id: str
    overrides: dict = Field(default_factory=dict)


class _Job:
    def __init__(self, job_id: str, dataset_id: str, overrides: dict, fingerprint: str):
        self.id = job_id
        self.dataset_id = dataset_id
        self.overrides = overrides
        self.fingerprint = fingerprint
        self.state = "queued"
        self.note = "waiting for a worker"
        self.error: str | None = None

    def status_doc(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "job_id": self.id,
            "dataset_id": self.dataset_id,
            "state": self.state,
            "note": self.note,
        }
        if self.error is not None:
            doc["error"] = self.error
        return doc


class _Store:
    """Dataset and job storage rooted at one directory; registry
    mutations are serialized behind a lock."""

    def __init__(self, root: Path):
        self.root = root
        self.datasets_dir = root / "datasets"
        self.results_dir = root / "results"
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self.results_dir.mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()
        self.jobs: dict[str, _Job] = {}
        self.executor = ThreadPoolExecutor(max_workers=MAX_WORKERS)
        self._recover()

    # -- datasets ---------------------------------------------------------

    def register_dataset(self, files: dict[str, bytes], scenario: dict) -> str:
        """Content-addressed registration; identical content yields the
        same id."""
        h = hashlib.sha256()
        for name in sorted(files):
            h.update(name.encode())
            h.update(files[name])
        h.update(json.dumps(scenario, sort_keys=True).encode())
        dataset_id = h.hexdigest()[:16]
        target = self.datasets_dir / dataset_id
        if target.exists():
            return dataset_id
        tmp = self.datasets_dir / f".tmp-{uuid.uuid4().hex}"
        tmp.mkdir()
        try:
            for name, blob in files.items():
                (tmp / name).write_bytes(blob)
            (tmp / "scenario.json").write_text(json.dumps(scenario, indent=2, sort_keys=True))
            # reject malformed uploads before they become visible
            config = scenario_from_dict(scenario, base_dir=tmp, source="upload")
            load_dataset(config)
            tmp.rename(target)
        except Exception:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        return dataset_id

    def dataset_config(self, dataset_id: str):
        d = self.datasets_dir / dataset_id
        if not d.exists():
            raise KeyError(dataset_id)
        raw = json.loads((d / "scenario.json").read_text())
        return raw, d

    def list_datasets(self) -> list[dict]:
        out = []
        for d in sorted(self.datasets_dir.iterdir()):
            if not d.is_dir() or d.name.startswith("."):
                continue
            try:
                raw = json.loads((d / "scenario.json").read_text())
                locs = pd.read_csv(d / "locations.csv")
                out.append(
                    {
                        "id": d.name,
                        "name": raw.get("name", d.name),
                        "locations": int(len(locs)),
                        "start_date": raw.get("start_date"),
                        "end_date": raw.get("end_date"),
                    }
                )
            except Exception:
                log.warning("skipping unreadable dataset %s", d.name)
        return out

    # -- jobs -------------------------------------------------------------

    def _job_dir(self, job_id: str) -> Path:
        return self.results_dir / job_id

    def _persist(self, job: _Job) -> None:
        d = self._job_dir(job.id)
        d.mkdir(parents=True, exist_ok=True)
        (d / "job.json").write_text(json.dumps(job.status_doc(), indent=2, sort_keys=True))

    def _recover(self) -> None:
        """Reload persisted jobs; anything that was in flight failed."""
        for d in self.results_dir.iterdir():
            if not (d / "job.json").exists():
                continue
            doc = json.loads((d / "job.json").read_text())
            job = _Job(doc["job_id"], doc.get("dataset_id", ""), {}, fingerprint="")
            job.state = doc.get("state", "failed")
            job.note = doc.get("note", "")
            job.error = doc.get("error")
            if job.state in ("queued", "running"):
                job.state = "failed"
                job.error = "interrupted by service restart"
                job.note = "restart"
                self._persist(job)
            self.jobs[job.id] = job

    def submit(self, body: JobSubmission) -> _Job:
        try:
            raw, base = self.dataset_config(body.dataset_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset {body.dataset_id!r}")
        merged = {**raw, **body.overrides}
        try:
            config = scenario_from_dict(merged, base_dir=base, source="request")
            if config.robust.enabled and config.robust.gamma > config.horizon:
                raise DataError("gamma: must not exceed the scenario horizon")
        except DataError as e:
            raise HTTPException(status_code=400, detail=str(e))

        fingerprint = hashlib.sha256(
            (body.dataset_id + json.dumps(body.overrides, sort_keys=True)).encode()
        ).hexdigest()
        with self.lock:
            for job in self.jobs.values():
                if job.fingerprint == fingerprint and job.state != "failed":
                    return job
            job = _Job(uuid.uuid4().hex[:12], body.dataset_id, body.overrides, fingerprint)
            self.jobs[job.id] = job
            self._persist(job)
        self.executor.submit(self._run, job.id, config)
        return job

    def _run(self, job_id: str, config) -> None:
        with self.lock:
            job = self.jobs[job_id]
            job.state = "running"
            job.note = "solving"
            self._persist(job)
        try:
            result = run_scenario(config)
            out = self._job_dir(job_id)
            save_results(
                result.instance,
                result.solution,
                result.metrics,
                result.plan,
                out,
                config.start_date,
            )
            with self.lock:
                job.state = "done"
                job.note = "complete"
                self._persist(job)
        except Exception as e:  # any failure marks the job failed, never crashes a worker
            log.exception("job %s failed", job_id)
            with self.lock:
                job.state = "failed"
                job.error = str(e)
                job.note = "failed"
                self._persist(job)

    def get(self, job_id: str) -> _Job:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")

    def result_doc(self, job_id: str) -> dict:
        job = self.get(job_id)
        if job.state != "done":
            detail = f"job is {job.state}"
            if job.error:
                detail += f": {job.error}"
            raise HTTPException(status_code=409, detail=detail)
        d = self._job_dir(job_id)
        metrics = json.loads((d / "metrics.json").read_text())
        transfers = pd.read_csv(d / "transfers.csv", float_precision="round_trip")
        census = pd.read_csv(d / "census.csv", float_precision="round_trip")
        return {
            "schema_version": SCHEMA_VERSION,
            "job_id": job_id,
            "metrics": metrics,
            "transfers": transfers.to_dict(orient="records"),
            "census": census.drop(columns=["active_no_transfers"]).to_dict(orient="records"),
            "baseline_census": census.drop(columns=["active"])
            .rename(columns={"active_no_transfers": "active"})
            .to_dict(orient="records"),
        }


def _register_bundled(store: _Store, scenario_path: str) -> None:
    path = Path(scenario_path)
    scenario = json.loads(path.read_text())
    base = (path.parent / scenario.get("data_dir", ".")).resolve()
    files = {}
    for name in DATASET_FILES:
        p = base / name
        if p.exists():
            files[name] = p.read_bytes()
    scenario = {**scenario, "data_dir": "."}
    dataset_id = store.register_dataset(files, scenario)
    log.info("registered bundled dataset %s", dataset_id)


def create_app(scenario_path: str | None = None, data_root: str | None = None) -> FastAPI:
    root = Path(data_root or os.environ.get("SURGEFLOW_HOME", Path.home() / ".surgeflow"))
    store = _Store(root)
    if scenario_path:
        _register_bundled(store, scenario_path)

    app = FastAPI(title="surgeflow", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get("SURGEFLOW_UI_ORIGIN", "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.get("/api/v1/datasets")
    def list_datasets():
        return {"schema_version": SCHEMA_VERSION, "datasets": store.list_datasets()}

    @app.post("/api/v1/datasets", status_code=201)
    async def upload_dataset(files: list[UploadFile], scenario: UploadFile):
        blobs = {}
        for f in files:
            if f.filename not in DATASET_FILES:
                raise HTTPException(status_code=400, detail=f"unexpected file {f.filename!r}")
            blobs[f.filename] = await f.read()
        try:
            scenario_doc = json.loads(await scenario.read())
        except json.JSONDecodeError as e:
            raise HTTPException(
                status_code=400, detail=f"scenario.json: invalid JSON at line {e.lineno}"
            )
        try:
            dataset_id = store.register_dataset(blobs, scenario_doc)
        except DataError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return {"schema_version": SCHEMA_VERSION, "dataset_id": dataset_id}

    @app.post("/api/v1/jobs", status_code=202)
    def submit_job(body: JobSubmission):
        job = store.submit(body)
        return {"schema_version": SCHEMA_VERSION, "job_id": job.id}

    @app.get("/api/v1/jobs/{job_id}")
    def job_status(job_id: str):
        return store.get(job_id).status_doc()

    @app.get("/api/v1/jobs/{job_id}/result")
    def job_result(job_id: str):
        return store.result_doc(job_id)

    return app
