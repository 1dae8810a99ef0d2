"""HTTP recommendation service.

Stateless per request: the workflow arrives as BPMN XML in the body and
is re-parsed every call; only the slice indexes (one per prediction
mode) are long-lived, loaded and validated once at startup.  Every
request is answered with a machine-readable error code on failure and
logged as one JSONL line (request_id, user_id, latency_ms, status).
"""

from __future__ import annotations

import contextlib
import json
import logging
import time
import uuid
from typing import Mapping

import anyio.to_thread
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .embedding import (
    Provider,
    ProviderUnavailableError,
    RemoteEmbedder,
    provider_from_spec,
)
from .model import (
    MalformedXmlError,
    NoProcessFoundError,
    UnknownNodeError,
    parse_bpmn,
)
from .recommender import (
    MODE_WITH_GATEWAYS,
    MODES,
    NoSliceEndsAtTargetError,
    RecommendationQuery,
    SliceIndex,
    load_index,
    recommend,
)

logger = logging.getLogger("procomplete.service")


class RecommendRequest(BaseModel):
    bpmn_xml: str
    task_id: str
    user_id: str
    k: int | None = Field(default=None, ge=1)
    filtered: bool = False
    mode: str | None = None


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _log_request(request_id: str, user_id: str, started: float, status: int) -> float:
    latency_ms = (time.perf_counter() - started) * 1000.0
    logger.info(
        json.dumps(
            {
                "request_id": request_id,
                "user_id": user_id,
                "latency_ms": round(latency_ms, 3),
                "status": status,
            }
        )
    )
    return latency_ms


def create_app(
    indexes: Mapping[str, SliceIndex],
    provider: Provider,
    k_default: int = 3,
    worker_threads: int = 8,
) -> FastAPI:
    """Build the API around pre-loaded indexes (one per mode).

    ``worker_threads`` bounds the pool that request handlers run on; a
    small pool keeps tail latency stable when many clients hit a
    saturated instance at once.
    """
    if not indexes:
        raise ValueError("at least one index is required")
    for mode, index in indexes.items():
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        if index.meta.mode != mode:
            raise ValueError(
                f"index registered under {mode!r} was built as {index.meta.mode!r}"
            )
        if index.meta.embedder != provider.descriptor:
            raise ValueError(
                f"index embedder {index.meta.embedder} does not match "
                f"provider {provider.descriptor}"
            )
    default_mode = (
        MODE_WITH_GATEWAYS if MODE_WITH_GATEWAYS in indexes else next(iter(indexes))
    )

    @contextlib.asynccontextmanager
    async def _lifespan(_: FastAPI):
        anyio.to_thread.current_default_thread_limiter().total_tokens = worker_threads
        yield

    app = FastAPI(title="procomplete", docs_url=None, redoc_url=None, lifespan=_lifespan)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "invalid_request", "message": str(exc.errors()[:3])}},
        )

    @app.exception_handler(Exception)
    async def _unhandled_error(request: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal_error", "message": "unexpected failure"}},
        )

    @app.get("/v1/health")
    def health() -> dict:
        return {
            "status": "ok",
            "indexes": {
                mode: {
                    "format_version": idx.meta.format_version,
                    "slice_length": idx.meta.slice_length,
                    "embedder": {
                        "id": idx.meta.embedder.id,
                        "dimension": idx.meta.embedder.dimension,
                    },
                    "mode": idx.meta.mode,
                    "created_at": idx.meta.created_at,
                    "records": len(idx),
                }
                for mode, idx in indexes.items()
            },
        }

    def _recommendations(body: RecommendRequest) -> list[dict]:
        mode = body.mode or default_mode
        if mode not in MODES:
            raise _ApiError(400, "invalid_request", f"unknown mode {mode!r}")
        index = indexes.get(mode)
        if index is None:
            raise _ApiError(409, "mode_not_loaded", f"no index loaded for mode {mode!r}")
        try:
            graphs = parse_bpmn(body.bpmn_xml)
        except (MalformedXmlError, NoProcessFoundError) as exc:
            raise _ApiError(400, "malformed_bpmn", str(exc)) from exc
        graph = next((g for g in graphs if body.task_id in g), None)
        if graph is None:
            raise _ApiError(
                404, "task_not_found", f"task {body.task_id!r} not in any process"
            )
        query = RecommendationQuery(
            graph=graph,
            target_node=body.task_id,
            k=body.k or k_default,
            filtered=body.filtered,
            mode=mode,
        )
        try:
            recs = recommend(query, index, provider)
        except UnknownNodeError as exc:
            # The target did not survive gateway contraction.
            raise _ApiError(404, "task_not_found", str(exc)) from exc
        except NoSliceEndsAtTargetError as exc:
            raise _ApiError(422, "no_slices", str(exc)) from exc
        except ProviderUnavailableError as exc:
            raise _ApiError(503, "provider_unavailable", str(exc)) from exc
        return [
            {
                "label": r.label,
                "type": r.type.to_json(),
                "score": r.score,
                "explanation": {
                    "matched_slice_text": r.explanation.matched_slice_text,
                    "source_process_id": r.explanation.source_process_id,
                    "similarity": r.explanation.similarity,
                },
            }
            for r in recs
        ]

    @app.post("/v1/recommendations")
    def recommendations(body: RecommendRequest) -> JSONResponse:
        request_id = str(uuid.uuid4())
        started = time.perf_counter()
        try:
            recs = _recommendations(body)
        except _ApiError as exc:
            _log_request(request_id, body.user_id, started, exc.status)
            return JSONResponse(
                status_code=exc.status,
                content={
                    "error": {"code": exc.code, "message": exc.message},
                    "request_id": request_id,
                },
            )
        latency_ms = _log_request(request_id, body.user_id, started, 200)
        return JSONResponse(
            {
                "recommendations": recs,
                "request_id": request_id,
                "latency_ms": round(latency_ms, 3),
            }
        )

    return app


def build_provider_for(
    indexes: Mapping[str, SliceIndex], provider_url: str | None = None
) -> Provider:
    """Derive the provider the indexes were built with (fail fast)."""
    descriptors = {idx.meta.embedder for idx in indexes.values()}
    if len(descriptors) != 1:
        raise ValueError(f"indexes disagree on the embedder: {descriptors}")
    descriptor = next(iter(descriptors))
    if provider_url is not None:
        if descriptor.id != f"remote:{provider_url}":
            raise ValueError(
                f"indexes were built with {descriptor.id!r}, "
                f"which does not match the endpoint {provider_url!r}"
            )
        return RemoteEmbedder(provider_url, descriptor.dimension)
    return provider_from_spec(descriptor.id, descriptor.dimension)


def load_indexes(paths: list[str]) -> dict[str, SliceIndex]:
    """Load one index per mode; duplicate modes are rejected."""
    indexes: dict[str, SliceIndex] = {}
    for path in paths:
        index = load_index(path)
        mode = index.meta.mode
        if mode in indexes:
            raise ValueError(f"two indexes loaded for mode {mode!r}")
        indexes[mode] = index
    return indexes


def serve(
    index_paths: list[str],
    bind: str = "127.0.0.1:8080",
    provider_url: str | None = None,
    k_default: int = 3,
    request_log: str | None = None,
) -> None:
    """Load indexes, then block serving HTTP until interrupted."""
    import uvicorn

    indexes = load_indexes(index_paths)
    provider = build_provider_for(indexes, provider_url)
    app = create_app(indexes, provider, k_default=k_default)
    if request_log:
        handler: logging.Handler = logging.FileHandler(request_log)
    else:
        handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)
    host, _, port = bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
