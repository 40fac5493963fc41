"""HTTP API for interactive retrieval sessions.

POST /collections                         ingest features/classes/taxonomy/config
POST /collections/{cid}/sessions          open a session from seed labels
GET  /sessions/{sid}/ranking              current ranking page
GET  /sessions/{sid}/query                the item the system wants labeled
POST /sessions/{sid}/labels               answer the query (or volunteer a label)
GET  /sessions/{sid}/history              append-only event log

Errors are {"error": code, "detail": text} with 404 for unknown ids, 409
for labeling a non-pending item, 422 for anything malformed.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .active import QueryStrategy
from .errors import (
    IngestError,
    NoPositiveSeedError,
    NotPendingItemError,
    PoolExhaustedError,
    RetrievalError,
    UnknownCollectionError,
    UnknownSessionError,
)
from .metrics import ranking_order
from .store import CollectionStore, SessionRuntime, SessionStore

DEFAULT_STORE = "./store"


class SeedLabel(BaseModel):
    item: int
    label: int = Field(description="+1 or -1")


class CreateSession(BaseModel):
    seeds: list[SeedLabel]
    strategy: str = "adaptive"
    constant_theta: float = 0.0
    strategy_seed: int = 0
    fusion: dict[str, float] = Field(
        default_factory=lambda: {"visual": 0.5, "semantic": 0.5}
    )


class SubmitLabel(BaseModel):
    item: int
    label: int
    volunteer: bool = False


def _session_summary(runtime: SessionRuntime) -> dict:
    return {
        "session_id": runtime.id,
        "collection_id": runtime.collection_id,
        "strategy": runtime.strategy.kind,
        "round": runtime.state.threshold.round,
        "theta": runtime.state.threshold.theta,
        "pending_item": runtime.pending,
        "labeled": len(runtime.state.label_state.labels),
        "n": runtime.state.n,
    }


def create_app(store_dir: str | Path | None = None) -> FastAPI:
    root = Path(store_dir or os.environ.get("RETRIEVAL_STORE", DEFAULT_STORE))
    collections = CollectionStore(root)
    sessions = SessionStore(root, collections)

    app = FastAPI(title="concept-retrieval")
    app.state.collections = collections
    app.state.sessions = sessions

    def error(status: int, code: str, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, "detail": detail})

    @app.exception_handler(UnknownCollectionError)
    @app.exception_handler(UnknownSessionError)
    async def _unknown(request: Request, exc: RetrievalError):
        return error(404, "unknown_id", str(exc))

    @app.exception_handler(NotPendingItemError)
    async def _not_pending(request: Request, exc: NotPendingItemError):
        return error(409, "not_pending_item", str(exc))

    @app.exception_handler(TimeoutError)
    async def _busy(request: Request, exc: TimeoutError):
        return error(503, "busy", str(exc))

    @app.exception_handler(RetrievalError)
    async def _invalid(request: Request, exc: RetrievalError):
        return error(422, type(exc).__name__, str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/collections")
    async def create_collection(
        features: UploadFile,
        classes: UploadFile,
        taxonomy: UploadFile,
        config: UploadFile | None = None,
    ):
        collection = collections.create(
            await features.read(),
            await classes.read(),
            await taxonomy.read(),
            await config.read() if config is not None else None,
        )
        return {
            "collection_id": collection.id,
            "n": collection.n,
            "k_visual": collection.modalities[0].k,
            "k_semantic": collection.modalities[1].k,
        }

    @app.get("/collections/{cid}")
    def get_collection(cid: str):
        collection = collections.get(cid)
        return {
            "collection_id": collection.id,
            "n": collection.n,
            "k_visual": collection.modalities[0].k,
            "k_semantic": collection.modalities[1].k,
        }

    @app.post("/collections/{cid}/sessions")
    def create_session(cid: str, body: CreateSession):
        for seed in body.seeds:
            if seed.label not in (-1, 1):
                raise IngestError("seeds", f"label must be +/-1, got {seed.label}")
        strategy = QueryStrategy(
            kind=body.strategy,
            constant_theta=body.constant_theta,
            seed=body.strategy_seed,
        )
        runtime = sessions.create(
            cid, [(s.item, s.label) for s in body.seeds], strategy, body.fusion
        )
        return _session_summary(runtime)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        return _session_summary(sessions.get(sid))

    @app.get("/sessions/{sid}/ranking")
    def get_ranking(sid: str, top_k: int = 16, offset: int = 0):
        runtime = sessions.get(sid)
        collection = collections.get(runtime.collection_id)
        state = runtime.state
        order = ranking_order(state.fused.values)
        page = order[offset : offset + max(0, top_k)]
        theta = state.threshold.theta
        labels = state.label_state.labels
        items = []
        for idx in page:
            i = int(idx)
            score = float(state.fused.values[i])
            items.append(
                {
                    "item": i,
                    "external_id": collection.item_ids[i],
                    "score": score,
                    "predicted": 1 if score > theta else -1,
                    "labeled": labels.get(i),
                    "thumbnail": collection.thumbnails[i],
                }
            )
        return {"items": items, "theta": theta}

    @app.get("/sessions/{sid}/query")
    def get_query(sid: str):
        runtime = sessions.get(sid)
        if runtime.pending is None:
            raise PoolExhaustedError("every item is labeled")
        score = float(runtime.state.fused.values[runtime.pending])
        return {
            "item": runtime.pending,
            "external_id": collections.get(runtime.collection_id).item_ids[runtime.pending],
            "thumbnail": collections.get(runtime.collection_id).thumbnails[runtime.pending],
            "score": score,
            "round": runtime.state.threshold.round,
        }

    @app.post("/sessions/{sid}/labels")
    def submit_label(sid: str, body: SubmitLabel):
        if body.label not in (-1, 1):
            raise IngestError("label", f"label must be +/-1, got {body.label}")
        runtime = sessions.submit_label(sid, body.item, body.label, body.volunteer)
        return {
            "round": runtime.state.threshold.round,
            "theta": runtime.state.threshold.theta,
            "queried_next": runtime.pending,
        }

    @app.get("/sessions/{sid}/history")
    def get_history(sid: str):
        runtime = sessions.get(sid)
        return {"session_id": sid, "events": runtime.history}

    return app
