##################################################################################################
#                                            OVERVIEW                                            #
#                                                                                                #
# FastAPI front end for GJCrazyVerify. It exposes REST endpoints that run the minimality,        #
# extremality and certificate checks on function files and retrieve the last run metrics.        #
##################################################################################################


import asyncio
import json
import os
import re
import time
from typing import Callable, Optional

from fastapi import FastAPI
from pydantic import BaseModel

from src.pipeline import RunResult, Settings, run_extremality, run_minimality, run_verify_perturbation
from utils.logs_config import log_completion, logger

##################################################################################################
#                                       FASTAPI INITIALIZATION                                   #
##################################################################################################

app = FastAPI(title="GJCrazyVerify", version="1.0.0")
_settings = Settings.from_env()
_slots = asyncio.Semaphore(_settings.threads)
_last_metrics: dict | None = None  # cache last run metrics in memory


##################################################################################################
#                                            MODELS                                              #
##################################################################################################


class FunctionRequest(BaseModel):
    function_file_path: str


class ExtremalityRequest(FunctionRequest):
    assume_pwc: Optional[bool] = None


class VerifyRequest(FunctionRequest):
    perturbation_file_path: str
    recheck: Optional[str] = None


##################################################################################################
#                                           ENDPOINTS                                            #
##################################################################################################


def _missing(*paths: str) -> Optional[dict]:
    for path in paths:
        if not os.path.exists(path):
            return {"error": f"Input file not found: {path}"}
    return None


async def _execute(run: Callable[[], RunResult]) -> dict:
    """
    Run one pipeline stage off the event loop and write its protocol to GJ_OUTPUT_DIR.
    """
    global _last_metrics

    start = time.perf_counter()
    try:
        async with _slots:
            result = await asyncio.to_thread(run)
    except Exception as exc:
        logger.error(f"[API] Run failed: {exc}")
        return {"error": str(exc)}

    document = dict(result.document)
    name = re.sub(r"[^A-Za-z0-9_.-]+", "_", document.get("function") or "function")
    os.makedirs(_settings.output_dir, exist_ok=True)
    output_path = os.path.join(_settings.output_dir, f"{name}_{result.command}.json")
    with open(output_path, mode="w", encoding="utf-8") as f:
        json.dump(document, f, indent=2)

    duration = log_completion("API", start, digits=2, command=result.command, function=name, exit=result.exit_code, output=output_path)
    document.update({"exit_code": result.exit_code, "duration_s": duration, "output_path": output_path})
    _last_metrics = {"command": result.command, "function": name, "exit_code": result.exit_code, "duration_s": duration, "output_path": output_path}
    return document


@app.get("/health")
async def health():
    """
    Health check endpoint.
    """
    return {"status": "ok", "service": "gj-crazy-verify"}


@app.get("/metrics")
async def metrics():
    """
    Return last execution metrics.
    """
    if _last_metrics is None:
        return {"message": "No verification has been executed yet."}
    return _last_metrics


@app.post("/minimality")
async def minimality_endpoint(body: FunctionRequest):
    """
    Decide minimality of the function in 'function_file_path'.
    """
    missing = _missing(body.function_file_path)
    if missing:
        return missing
    logger.info(f"[API] Minimality for {body.function_file_path}")
    return await _execute(lambda: run_minimality(body.function_file_path, _settings.threads))


@app.post("/extremality")
async def extremality_endpoint(body: ExtremalityRequest):
    """
    Extremality relative to piecewise continuous perturbations; 'assume_pwc' defaults to GJ_ASSUME_PWC.
    """
    missing = _missing(body.function_file_path)
    if missing:
        return missing
    logger.info(f"[API] Extremality for {body.function_file_path}")
    return await _execute(lambda: run_extremality(body.function_file_path, body.assume_pwc, _settings.threads))


@app.post("/verify-perturbation")
async def verify_perturbation_endpoint(body: VerifyRequest):
    """
    Verify the perturbation certificate in 'perturbation_file_path' against the function.
    """
    missing = _missing(body.function_file_path, body.perturbation_file_path)
    if missing:
        return missing
    logger.info(f"[API] Certificate {body.perturbation_file_path} for {body.function_file_path}")
    return await _execute(lambda: run_verify_perturbation(body.function_file_path, body.perturbation_file_path, _settings.threads, body.recheck))
