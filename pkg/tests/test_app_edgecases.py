##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# Tests the FastAPI endpoints (app.py): default metrics, missing input files, request          #
# validation, successful runs writing their protocol to GJ_OUTPUT_DIR and run failures.          #
##################################################################################################

##################################################################################################
#                                            IMPORTS                                             #
##################################################################################################

import json
import os

import pytest

from src.pipeline import Settings

##################################################################################################
#                                             TESTS                                              #
##################################################################################################

pytestmark = pytest.mark.asyncio


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    """Route protocol files to a temporary directory and forget earlier runs."""
    monkeypatch.setattr("app._settings", Settings(output_dir=str(tmp_path / "outputs")))
    monkeypatch.setattr("app._last_metrics", None)
    return tmp_path / "outputs"


async def test_metrics_before_any_run(test_client, output_dir):
    """No verification executed yet → returns default message."""
    resp = await test_client.get("/metrics")
    assert resp.status_code == 200
    assert "No verification" in resp.json()["message"]


async def test_minimality_with_nonexistent_file(tmp_path, test_client, output_dir):
    """Non-existent input file → returns error JSON."""
    resp = await test_client.post("/minimality", json={"function_file_path": str(tmp_path / "missing.json")})
    assert resp.status_code == 200
    data = resp.json()
    assert "error" in data and "not found" in data["error"]


async def test_verify_with_missing_perturbation(test_client, gmic_file, tmp_path, output_dir):
    """Both paths are checked before running."""
    payload = {"function_file_path": gmic_file, "perturbation_file_path": str(tmp_path / "none.json")}
    resp = await test_client.post("/verify-perturbation", json=payload)
    assert "none.json" in resp.json()["error"]


async def test_request_validation(test_client, output_dir):
    """Missing body fields → 422."""
    resp = await test_client.post("/extremality", json={})
    assert resp.status_code == 422


async def test_minimality_run_and_metrics(test_client, gmic_file, output_dir):
    """A run returns its document, writes it and updates /metrics."""
    resp = await test_client.post("/minimality", json={"function_file_path": gmic_file})
    assert resp.status_code == 200, resp.text
    data = resp.json()
    assert data["is_minimal"] is True and data["exit_code"] == 0
    assert os.path.dirname(data["output_path"]) == str(output_dir)
    with open(data["output_path"], encoding="utf-8") as f:
        assert json.load(f)["command"] == "minimality"
    metrics = (await test_client.get("/metrics")).json()
    assert metrics["command"] == "minimality"
    assert metrics["function"] == "gmic"


async def test_extremality_of_non_minimal_function(test_client, gomory_fractional_file, output_dir):
    """Not minimal → exit code 1 in the document."""
    resp = await test_client.post("/extremality", json={"function_file_path": gomory_fractional_file, "assume_pwc": False})
    data = resp.json()
    assert data["verdict"] == "not minimal"
    assert data["exit_code"] == 1
    assert data["output_path"].endswith("gomory_fractional_extremality.json")


async def test_run_exception(monkeypatch, test_client, gmic_file, output_dir):
    """Internal exception during a run → error JSON."""
    monkeypatch.setattr("app.run_minimality", lambda *a, **kw: (_ for _ in ()).throw(Exception("boom")))
    resp = await test_client.post("/minimality", json={"function_file_path": gmic_file})
    assert resp.status_code == 200
    data = resp.json()
    assert "error" in data and "boom" in data["error"]
