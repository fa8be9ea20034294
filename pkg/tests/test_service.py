from __future__ import annotations

import base64
import json

import pytest
from fastapi.testclient import TestClient

from text2chart import DatasetRegistry
from text2chart.service import create_app

from conftest import (
    CASE1_QUERY,
    DATA_DIR,
    FIXTURES_DIR,
    build_sqlite,
)

ALL_MODELS = ["text-davinci-003", "code-davinci-002", "gpt-3.5-turbo"]

TINY_PNG = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGP4"
    "z8DwHwAFBQIAX8jx0gAAAABJRU5ErkJggg=="
)


@pytest.fixture
def client(tmp_path):
    app = create_app(
        registry=DatasetRegistry(),
        fixtures_store=FIXTURES_DIR,
        builtin_data=DATA_DIR,
        executor=None,
    )
    return TestClient(app)


@pytest.fixture
def empty_client(tmp_path):
    app = create_app(
        registry=DatasetRegistry(),
        fixtures_store=FIXTURES_DIR,
        builtin_data=tmp_path / "nowhere",
        executor=None,
    )
    return TestClient(app)


def _dataset_id(client, name):
    datasets = client.get("/datasets").json()
    return next(d["id"] for d in datasets if d["name"] == name)


def test_empty_registry_lists_nothing(empty_client):
    assert empty_client.get("/datasets").json() == []


def test_builtin_datasets_present_at_startup(client):
    names = {d["name"] for d in client.get("/datasets").json()}
    assert {"products", "movies", "colleges", "energy", "customer_products"} <= names


def test_upload_csv_roundtrip(empty_client):
    body = (DATA_DIR / "products.csv").read_bytes()
    response = empty_client.post(
        "/datasets", params={"kind": "csv", "name": "products"}, content=body
    )
    assert response.status_code == 200
    ids = response.json()["dataset_ids"]
    assert len(ids) == 1
    listed = empty_client.get("/datasets").json()
    assert listed[0]["id"] == ids[0]
    assert listed[0]["columns"][0] == "product_id"
    assert listed[0]["row_count"] == 15


def test_upload_corrupt_csv_is_400(empty_client):
    response = empty_client.post(
        "/datasets", params={"kind": "csv", "name": "bad"}, content=b"a,b,a\n1,2,3\n"
    )
    assert response.status_code == 400
    assert "DuplicateColumn" in response.json()["detail"]


def test_upload_sqlite_two_tables_two_ids(empty_client, tmp_path):
    db_path = build_sqlite(
        tmp_path / "two.sqlite",
        {
            "alpha": (["a INTEGER"], [(1,)]),
            "beta": (["b TEXT"], [("x",)]),
        },
    )
    response = empty_client.post(
        "/datasets",
        params={"kind": "sqlite", "name": "two"},
        content=db_path.read_bytes(),
    )
    assert response.status_code == 200
    assert len(response.json()["dataset_ids"]) == 2


def test_upload_unknown_kind_is_400(empty_client):
    response = empty_client.post(
        "/datasets", params={"kind": "parquet"}, content=b"x"
    )
    assert response.status_code == 400


def test_upload_empty_body_is_400(empty_client):
    response = empty_client.post("/datasets", params={"kind": "csv"}, content=b"")
    assert response.status_code == 400


def test_dataset_preview(client):
    dataset_id = _dataset_id(client, "products")
    preview = client.get(f"/datasets/{dataset_id}/preview", params={"limit": 3}).json()
    assert preview["columns"][0] == "product_id"
    assert len(preview["rows"]) == 3
    assert preview["rows"][0][1] == "Clothes"
    assert preview["row_count"] == 15


def test_dataset_preview_unknown_is_404(client):
    assert client.get("/datasets/ds-999/preview").status_code == 404


def test_submit_query_unknown_dataset_is_404(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": "ds-9999",
            "query_text": "anything",
            "models": ALL_MODELS,
        },
    )
    assert response.status_code == 404


def test_submit_empty_query_is_400(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "movies"),
            "query_text": "   ",
            "models": ALL_MODELS,
        },
    )
    assert response.status_code == 400


def test_submit_no_models_is_400(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "movies"),
            "query_text": "x",
            "models": [],
        },
    )
    assert response.status_code == 400


def test_submit_unknown_model_is_400(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "movies"),
            "query_text": "x",
            "models": ["gpt-99"],
        },
    )
    assert response.status_code == 400


def test_misspelled_query_three_outcomes(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "movies"),
            "query_text": "draw the numbr of movie by gener",
            "models": ALL_MODELS,
            "provider": "replay",
        },
    )
    assert response.status_code == 200
    job = response.json()
    assert job["status"] == "complete"
    assert set(job["outcomes"]) == set(ALL_MODELS)
    for outcome in job["outcomes"].values():
        assert outcome["error"] is None
        assert outcome["sanitized_script"].startswith("import pandas as pd")
        assert "Genre" in outcome["sanitized_script"]


def test_tomatoes_query_references_rating_column(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "movies"),
            "query_text": "tomatoes",
            "models": ALL_MODELS,
            "provider": "replay",
        },
    )
    job = response.json()
    for outcome in job["outcomes"].values():
        assert "Rotten Tomatoes Rating" in outcome["sanitized_script"]


def test_job_artifacts_are_exact(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": CASE1_QUERY,
            "models": ["text-davinci-003"],
            "provider": "replay",
        },
    )
    job = response.json()
    outcome = job["outcomes"]["text-davinci-003"]
    raw = (FIXTURES_DIR / "case1" / "text-davinci-003.txt").read_text()
    assert outcome["raw_completion"] == raw
    golden = (FIXTURES_DIR.parent / "scripts" / "case1_sanitized.txt").read_text()
    assert outcome["sanitized_script"] == golden
    fetched = client.get(f"/jobs/{job['job_id']}").json()
    assert fetched == job


def test_one_model_failure_never_blocks_others(client):
    # "tomatoes" resolves for the movies dataset; submitting it against
    # products has no fixture, so in replay mode every outcome records the
    # miss independently
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": CASE1_QUERY,
            "models": ALL_MODELS,
            "provider": "replay",
        },
    )
    job = response.json()
    assert all(o["error"] is None for o in job["outcomes"].values())

    broken = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": "a query recorded for no model",
            "models": ALL_MODELS,
            "provider": "replay",
        },
    )
    job = broken.json()
    assert broken.status_code == 200
    for outcome in job["outcomes"].values():
        assert outcome["error"] is not None
        assert "FixtureMissing" in outcome["error"]


def test_chart_endpoint_404_without_execution(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": CASE1_QUERY,
            "models": ["text-davinci-003"],
            "provider": "replay",
        },
    )
    job_id = response.json()["job_id"]
    chart = client.get(f"/jobs/{job_id}/models/text-davinci-003/chart.png")
    assert chart.status_code == 404


def test_chart_endpoint_serves_png_with_executor(tmp_path):
    def executor(request):
        return {
            "status": "ok",
            "png_b64": base64.b64encode(TINY_PNG).decode(),
            "stderr_tail": "",
            "duration_ms": 3,
        }

    app = create_app(
        registry=DatasetRegistry(),
        fixtures_store=FIXTURES_DIR,
        builtin_data=DATA_DIR,
        executor=executor,
        persist_dir=tmp_path / "jobs",
    )
    client = TestClient(app)
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": CASE1_QUERY,
            "models": ["text-davinci-003"],
            "provider": "replay",
        },
    )
    job = response.json()
    chart = client.get(
        f"/jobs/{job['job_id']}/models/text-davinci-003/chart.png"
    )
    assert chart.status_code == 200
    assert chart.headers["content-type"] == "image/png"
    assert chart.content == TINY_PNG
    # persisted artifacts
    job_dir = tmp_path / "jobs" / job["job_id"]
    assert (job_dir / "job.json").is_file()
    assert (job_dir / "text-davinci-003.png").read_bytes() == TINY_PNG


def test_api_key_never_stored_in_job(client):
    response = client.post(
        "/jobs",
        json={
            "dataset_id": _dataset_id(client, "products"),
            "query_text": CASE1_QUERY,
            "models": ["text-davinci-003"],
            "provider": "replay",
            "api_key": "sk-should-never-appear",
        },
    )
    job = response.json()
    assert "sk-should-never-appear" not in json.dumps(job)
    fetched = client.get(f"/jobs/{response.json()['job_id']}").json()
    assert "sk-should-never-appear" not in json.dumps(fetched)


def test_unknown_job_is_404(client):
    assert client.get("/jobs/nope").status_code == 404
    assert client.get("/jobs/nope/models/x/chart.png").status_code == 404
