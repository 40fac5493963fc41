"""Persistence and session runtime for the retrieval service.

Collections keep their raw input files plus the precomputed bases on disk;
the interpolated item bases are recomputed on load (they are cheap and
deterministic). Sessions are append-only JSONL event logs: one creation
record followed by one record per accepted label. Replaying a log through
the same solve path reconstructs the exact in-memory state, so a restart
loses nothing.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import eigenmap
from .active import (
    QueryStrategy,
    RetrievalState,
    predict_label,
    select_query,
    solve_all,
    start_session,
    threshold_update,
)
from .config import EngineConfig
from .dataio import parse_features
from .errors import (
    IngestError,
    NoPositiveSeedError,
    NotPendingItemError,
    PoolExhaustedError,
    RetrievalError,
    UnknownCollectionError,
    UnknownSessionError,
)
from .modalities import Modality, build_semantic, build_visual
from .numerics import PcaModel, pca_transform
from .solver import FusionWeights, LabelState
from .taxonomy import (
    ClassBasis,
    assign_item_vectors,
    load_item_classes,
    load_taxonomy,
)


@dataclass(frozen=True)
class Collection:
    id: str
    n: int
    item_ids: list[str]
    item_classes: list[str]
    thumbnails: list[str | None]
    modalities: tuple[Modality, ...]
    engine: EngineConfig


class CollectionStore:
    def __init__(self, root: Path):
        self.root = Path(root) / "collections"
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, Collection] = {}
        self._lock = threading.Lock()

    def create(
        self,
        features: bytes,
        classes: bytes,
        taxonomy: bytes,
        config: bytes | None,
    ) -> Collection:
        try:
            matrix = parse_features(features, name="features")
        except RetrievalError as exc:
            raise IngestError("features", str(exc)) from exc
        try:
            item_ids, item_classes = load_item_classes(classes)
        except RetrievalError as exc:
            raise IngestError("classes", str(exc)) from exc
        try:
            tree = load_taxonomy(taxonomy)
        except (RetrievalError, ValueError, KeyError) as exc:
            raise IngestError("taxonomy", str(exc)) from exc
        raw_cfg = {}
        if config:
            try:
                raw_cfg = json.loads(config)
            except ValueError as exc:
                raise IngestError("config", str(exc)) from exc
        engine = EngineConfig.from_dict(raw_cfg)
        if len(item_ids) != matrix.shape[0]:
            raise IngestError(
                "classes",
                f"lists {len(item_ids)} items but features hold {matrix.shape[0]}",
            )
        leaves = set(tree.leaves_under(tree.root))
        for cls in set(item_classes):
            if cls not in leaves:
                raise IngestError("classes", f"item class {cls!r} not a taxonomy leaf")

        cid = uuid.uuid4().hex[:12]
        cdir = self.root / cid
        cdir.mkdir(parents=True)
        (cdir / "features.fmat").write_bytes(features)
        (cdir / "classes.csv").write_bytes(classes)
        (cdir / "taxonomy.json").write_bytes(taxonomy)

        try:
            visual = build_visual(matrix, engine)
            semantic = build_semantic(tree, item_classes, engine)
        except RetrievalError as exc:
            raise IngestError("features", f"basis construction failed: {exc}") from exc

        eigenmap.save_basis(cdir / "visual.eigb", visual.basis)
        np.savez(
            cdir / "pca.npz",
            mean=visual.pca.mean,
            components=visual.pca.components,
            explained_variances=visual.pca.explained_variances,
        )
        np.savez(
            cdir / "class_basis.npz",
            class_ids=np.array(semantic.class_basis.class_ids),
            vectors=semantic.class_basis.vectors,
            eigenvalues=semantic.class_basis.eigenvalues,
        )
        template = raw_cfg.get("thumbnail_template")
        thumbnails = [
            template.format(item_id=i) if template else None for i in item_ids
        ]
        meta = {
            "id": cid,
            "n": matrix.shape[0],
            "item_ids": item_ids,
            "item_classes": item_classes,
            "thumbnail_template": template,
            "engine": engine.to_dict(),
        }
        (cdir / "meta.json").write_text(json.dumps(meta))
        collection = Collection(
            id=cid,
            n=matrix.shape[0],
            item_ids=item_ids,
            item_classes=item_classes,
            thumbnails=thumbnails,
            modalities=(visual.modality, semantic.modality),
            engine=engine,
        )
        with self._lock:
            self._cache[cid] = collection
        return collection

    def get(self, cid: str) -> Collection:
        with self._lock:
            if cid in self._cache:
                return self._cache[cid]
        collection = self._load(cid)
        with self._lock:
            self._cache[cid] = collection
        return collection

    def _load(self, cid: str) -> Collection:
        cdir = self.root / cid
        if not (cdir / "meta.json").exists():
            raise UnknownCollectionError(f"no collection {cid!r}")
        meta = json.loads((cdir / "meta.json").read_text())
        engine = EngineConfig.from_dict(meta["engine"])
        matrix = parse_features((cdir / "features.fmat").read_bytes(), name="features")
        pca_npz = np.load(cdir / "pca.npz")
        pca = PcaModel(
            mean=pca_npz["mean"],
            components=pca_npz["components"],
            explained_variances=pca_npz["explained_variances"],
        )
        basis = eigenmap.load_basis(cdir / "visual.eigb")
        u_visual = eigenmap.interpolate(basis, pca_transform(pca, matrix))
        cb_npz = np.load(cdir / "class_basis.npz")
        class_basis = ClassBasis(
            class_ids=tuple(str(c) for c in cb_npz["class_ids"]),
            vectors=cb_npz["vectors"],
            eigenvalues=cb_npz["eigenvalues"],
        )
        u_semantic = assign_item_vectors(class_basis, meta["item_classes"])
        template = meta.get("thumbnail_template")
        thumbnails = [
            template.format(item_id=i) if template else None for i in meta["item_ids"]
        ]
        return Collection(
            id=cid,
            n=meta["n"],
            item_ids=meta["item_ids"],
            item_classes=meta["item_classes"],
            thumbnails=thumbnails,
            modalities=(
                Modality(tag="visual", u=u_visual, eigenvalues=basis.eigenvalues),
                Modality(tag="semantic", u=u_semantic, eigenvalues=class_basis.eigenvalues),
            ),
            engine=engine,
        )


@dataclass
class SessionRuntime:
    id: str
    collection_id: str
    strategy: QueryStrategy
    state: RetrievalState
    pending: int | None
    history: list[dict]
    created_at: float
    updated_at: float
    lock: threading.Lock


def _apply_query_label(
    state: RetrievalState, strategy: QueryStrategy, item: int, label: int
) -> RetrievalState:
    """Accept the label of the currently pending (system-queried) item."""
    threshold = state.threshold
    if strategy.kind == "adaptive":
        predicted = predict_label(state.fused, threshold.theta, item)
        threshold = threshold_update(threshold, predicted, label)
    else:
        threshold = replace(threshold, round=threshold.round + 1)
    label_state = state.label_state.with_label(item, label)
    per, fused = solve_all(state.modalities, state.fusion, label_state)
    return replace(
        state, label_state=label_state, threshold=threshold, fused=fused, per_modality=per
    )


def _apply_volunteer_label(state: RetrievalState, item: int, label: int) -> RetrievalState:
    """Volunteered labels re-solve but never move the threshold or round."""
    label_state = state.label_state.with_label(item, label)
    per, fused = solve_all(state.modalities, state.fusion, label_state)
    return replace(state, label_state=label_state, fused=fused, per_modality=per)


def _next_pending(state: RetrievalState, strategy: QueryStrategy) -> int | None:
    try:
        return select_query(state, strategy)
    except PoolExhaustedError:
        return None


class SessionStore:
    LOCK_TIMEOUT_S = 10.0

    def __init__(self, root: Path, collections: CollectionStore):
        self.root = Path(root) / "sessions"
        self.root.mkdir(parents=True, exist_ok=True)
        self.collections = collections
        self._sessions: dict[str, SessionRuntime] = {}
        self._lock = threading.Lock()

    # -- creation --------------------------------------------------------

    def create(
        self,
        collection_id: str,
        seeds: list[tuple[int, int]],
        strategy: QueryStrategy,
        fusion: dict[str, float],
    ) -> SessionRuntime:
        collection = self.collections.get(collection_id)
        if not any(label == 1 for _, label in seeds):
            raise NoPositiveSeedError("at least one positive seed label required")
        sid = uuid.uuid4().hex[:12]
        now = time.time()
        record = {
            "type": "created",
            "session_id": sid,
            "collection_id": collection_id,
            "seeds": [[int(i), int(l)] for i, l in seeds],
            "strategy": {
                "kind": strategy.kind,
                "constant_theta": strategy.constant_theta,
                "seed": strategy.seed,
            },
            "fusion": fusion,
            "ts": now,
        }
        runtime = self._start_runtime(sid, collection, record, created_at=now)
        with open(self.root / f"{sid}.jsonl", "w") as fh:
            fh.write(json.dumps(record) + "\n")
        with self._lock:
            self._sessions[sid] = runtime
        return runtime

    def _start_runtime(
        self, sid: str, collection: Collection, created: dict, created_at: float
    ) -> SessionRuntime:
        strategy = QueryStrategy(**created["strategy"])
        label_state = LabelState(
            labels={int(i): int(l) for i, l in created["seeds"]},
            lambda_reg=collection.engine.lambda_reg,
        )
        state = start_session(
            collection.modalities,
            FusionWeights(dict(created["fusion"])),
            label_state,
            strategy,
            step_alpha=collection.engine.step_alpha,
        )
        return SessionRuntime(
            id=sid,
            collection_id=collection.id,
            strategy=strategy,
            state=state,
            pending=_next_pending(state, strategy),
            history=[],
            created_at=created_at,
            updated_at=created_at,
            lock=threading.Lock(),
        )

    # -- access ----------------------------------------------------------

    def get(self, sid: str) -> SessionRuntime:
        with self._lock:
            if sid in self._sessions:
                return self._sessions[sid]
        runtime = self._replay(sid)
        with self._lock:
            self._sessions[sid] = runtime
        return runtime

    def _replay(self, sid: str) -> SessionRuntime:
        path = self.root / f"{sid}.jsonl"
        if not path.exists():
            raise UnknownSessionError(f"no session {sid!r}")
        lines = path.read_text().splitlines()
        created = json.loads(lines[0])
        collection = self.collections.get(created["collection_id"])
        runtime = self._start_runtime(sid, collection, created, created_at=created["ts"])
        for line in lines[1:]:
            event = json.loads(line)
            if event["volunteer"]:
                runtime.state = _apply_volunteer_label(
                    runtime.state, event["item"], event["label"]
                )
            else:
                runtime.state = _apply_query_label(
                    runtime.state, runtime.strategy, event["item"], event["label"]
                )
            runtime.pending = _next_pending(runtime.state, runtime.strategy)
            runtime.history.append(event)
            runtime.updated_at = event["ts"]
        return runtime

    # -- mutation ----------------------------------------------------------

    def submit_label(
        self, sid: str, item: int, label: int, volunteer: bool = False
    ) -> SessionRuntime:
        runtime = self.get(sid)
        if not runtime.lock.acquire(timeout=self.LOCK_TIMEOUT_S):
            raise TimeoutError("another label for this session is still being applied")
        try:
            state = runtime.state
            if volunteer:
                if item in state.label_state.labels:
                    raise NotPendingItemError(f"item {item} is already labeled")
                if not (0 <= item < state.n):
                    raise NotPendingItemError(f"item {item} outside the collection")
                round_before = state.threshold.round
                runtime.state = _apply_volunteer_label(state, item, label)
            else:
                if runtime.pending is None or item != runtime.pending:
                    raise NotPendingItemError(
                        f"item {item} is not the pending query item ({runtime.pending})"
                    )
                round_before = state.threshold.round
                runtime.state = _apply_query_label(state, runtime.strategy, item, label)
            runtime.pending = _next_pending(runtime.state, runtime.strategy)
            event = {
                "type": "label",
                "round": round_before,
                "item": int(item),
                "label": int(label),
                "volunteer": bool(volunteer),
                "theta_after": runtime.state.threshold.theta,
                "queried_next": runtime.pending,
                "ts": time.time(),
            }
            with open(self.root / f"{sid}.jsonl", "a") as fh:
                fh.write(json.dumps(event) + "\n")
            runtime.history.append(event)
            runtime.updated_at = event["ts"]
            return runtime
        finally:
            runtime.lock.release()

    def drop_cache(self) -> None:
        """Forget in-memory state (used to exercise replay)."""
        with self._lock:
            self._sessions.clear()
