"""HTTP service orchestrating the pipeline: dataset management, query
submission across selected models, artifact retrieval.

Jobs live in memory (optionally mirrored to a directory as JSON + PNG
files). Every finished job exposes, per model, the exact prompt sent, the
exact raw completion and the exact executed script. Outcomes are
independent: one model failing never blocks the others.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request, Response
from pydantic import BaseModel

from .errors import IngestError
from .gateway import (
    KNOWN_MODELS,
    HttpProvider,
    Provider,
    ProviderConfig,
    ReplayProvider,
    Secret,
)
from .ingest import DatasetRegistry, SourceMeta, load_csv, load_sqlite
from .paths import data_dir, fixtures_dir
from .pipeline import (
    Executor,
    PipelineOptions,
    execution_image,
    run_model_pipeline,
)
from .prompting import PromptConfig

MAX_PARALLEL_MODELS = 3

AUTO_EXECUTOR = object()  # create_app sentinel: discover the sandbox if installed


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


class JobStore:
    def __init__(self, persist_dir: Optional[Path] = None) -> None:
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self.persist_dir = persist_dir

    def put(self, job: dict) -> None:
        with self._lock:
            self._jobs[job["job_id"]] = job
        if self.persist_dir is not None:
            self._persist(job)

    def get(self, job_id: str) -> Optional[dict]:
        return self._jobs.get(job_id)

    def _persist(self, job: dict) -> None:
        job_dir = self.persist_dir / job["job_id"]
        job_dir.mkdir(parents=True, exist_ok=True)
        (job_dir / "job.json").write_text(
            json.dumps(job, indent=2), encoding="utf-8"
        )
        for wire_name, outcome in job["outcomes"].items():
            execution = outcome.get("execution")
            image = execution_image(execution)
            if image:
                (job_dir / f"{wire_name}.png").write_bytes(image)


class SubmitRequest(BaseModel):
    dataset_id: str
    query_text: str
    models: list[str]
    provider: str = "replay"
    api_key: Optional[str] = None


def default_executor() -> Optional[Executor]:
    try:
        from plotsandbox import execute
    except ImportError:
        return None
    return execute


def load_builtin_datasets(registry: DatasetRegistry, directory: Path) -> None:
    if not directory.is_dir():
        return
    for path in sorted(directory.glob("*.csv")):
        frame = load_csv(path.read_bytes(), path.stem)
        registry.register(
            frame, SourceMeta(origin_kind="builtin", origin_name=path.name)
        )


def create_app(
    registry: Optional[DatasetRegistry] = None,
    fixtures_store: Optional[Path] = None,
    persist_dir: Optional[Path] = None,
    executor=AUTO_EXECUTOR,
    builtin_data: Optional[Path] = None,
    config: Optional[PromptConfig] = None,
) -> FastAPI:
    app = FastAPI(title="text2chart")
    registry = registry if registry is not None else DatasetRegistry()
    store = JobStore(persist_dir)
    fixtures_store = fixtures_store or fixtures_dir()
    if executor is AUTO_EXECUTOR:
        executor = default_executor()
    config = config or PromptConfig()
    load_builtin_datasets(
        registry, builtin_data if builtin_data is not None else data_dir()
    )

    def _provider_for(request: SubmitRequest) -> Provider:
        if request.provider == "replay":
            return ReplayProvider(fixtures_store)
        if request.provider == "live":
            key = request.api_key or os.environ.get("OPENAI_API_KEY", "")
            base_url = os.environ.get(
                "OPENAI_BASE_URL", "https://api.openai.com/v1"
            )
            return HttpProvider(
                ProviderConfig(base_url=base_url, api_key=Secret(key))
            )
        raise HTTPException(400, f"unknown provider {request.provider!r}")

    @app.get("/datasets")
    def list_datasets() -> list[dict]:
        summaries = []
        for dataset_id in registry.list_ids():
            frame, meta = registry.get(dataset_id)
            summaries.append(
                {
                    "id": dataset_id,
                    "name": frame.name,
                    "columns": frame.column_names,
                    "row_count": frame.row_count,
                    "origin_kind": meta.origin_kind,
                }
            )
        return summaries

    @app.get("/datasets/{dataset_id}/preview")
    def preview_dataset(dataset_id: str, limit: int = 20) -> dict:
        try:
            frame, _ = registry.get(dataset_id)
        except IngestError:
            raise HTTPException(404, f"unknown dataset {dataset_id!r}")
        count = max(0, min(limit, frame.row_count))
        rows = [
            [col.cells[i] for col in frame.columns] for i in range(count)
        ]
        return {
            "columns": frame.column_names,
            "rows": rows,
            "row_count": frame.row_count,
        }

    @app.post("/datasets")
    async def upload_dataset(
        request: Request,
        kind: str = Query(...),
        name: str = Query("uploaded"),
    ) -> dict:
        body = await request.body()
        if not body:
            raise HTTPException(400, "empty upload")
        try:
            if kind == "csv":
                frames = [load_csv(body, name)]
            elif kind == "sqlite":
                with tempfile.NamedTemporaryFile(suffix=".sqlite") as handle:
                    handle.write(body)
                    handle.flush()
                    frames = load_sqlite(handle.name)
            else:
                raise HTTPException(400, f"unknown kind {kind!r}")
        except IngestError as exc:
            raise HTTPException(400, f"{type(exc).__name__}: {exc}") from exc
        ids = [
            registry.register(
                frame, SourceMeta(origin_kind=kind, origin_name=name)
            )
            for frame in frames
        ]
        return {"dataset_ids": ids}

    @app.post("/jobs")
    def submit_query(request: SubmitRequest) -> dict:
        try:
            frame, _ = registry.get(request.dataset_id)
        except IngestError:
            raise HTTPException(404, f"unknown dataset {request.dataset_id!r}")
        if not request.query_text.strip():
            raise HTTPException(400, "query_text is empty")
        if not request.models:
            raise HTTPException(400, "select at least one model")
        models = []
        for wire_name in request.models:
            model = KNOWN_MODELS.get(wire_name)
            if model is None:
                raise HTTPException(400, f"unknown model {wire_name!r}")
            models.append(model)
        provider = _provider_for(request)
        options = PipelineOptions(config=config, executor=executor)

        def run_one(model):
            return run_model_pipeline(
                frame, request.query_text, model, provider, options
            )

        with ThreadPoolExecutor(max_workers=MAX_PARALLEL_MODELS) as pool:
            outcomes = list(pool.map(run_one, models))

        job = {
            "job_id": uuid.uuid4().hex,
            "dataset_id": request.dataset_id,
            "query_text": request.query_text,
            "provider": request.provider,
            "created_at": _utcnow(),
            "status": "complete",
            "outcomes": {
                outcome.model.wire_name: outcome.to_dict()
                for outcome in outcomes
            },
        }
        store.put(job)
        return job

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        job = store.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        return job

    @app.get("/jobs/{job_id}/models/{wire_name}/chart.png")
    def get_chart(job_id: str, wire_name: str) -> Response:
        job = store.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        outcome = job["outcomes"].get(wire_name)
        if outcome is None:
            raise HTTPException(404, f"no outcome for model {wire_name!r}")
        image = execution_image(outcome.get("execution"))
        if not image:
            raise HTTPException(404, "no chart was rendered for this outcome")
        return Response(content=image, media_type="image/png")

    return app
