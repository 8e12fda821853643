"""Local JSON-over-HTTP service exposing the pipeline to interactive clients.

A session runs the expensive stages once (projection, triangulation,
all-pairs geodesics, terrain) in a background worker; re-cutting the
hierarchy at a new k or structure type only replays the cheap cut, so
interactive exploration stays sub-second.  Manually marked outliers are
label surgery on top of the automatic cut: marking never re-runs the
swarm, and unmarking restores the previous result exactly.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .cluster import MODES, Dendrogram, geodesic_distances, linkage_matrix
from .data import Dataset, DissimilarityMatrix, euclidean_dissimilarity
from .engine import swarm_project
from .errors import SwarmMapError
from .topomap import delaunay_torus, detect_volcanoes, render_heightmap, u_heights

OUTLIER_CLASS_OFFSET = 1  # marked points move to class k_max + 1


class SessionRequest(BaseModel):
    points: list[list[float]] | None = None
    labels: list[int] | None = None
    matrix: list[list[float]] | None = None
    seed: int = 0
    name: str = "session"


class ClusterRequest(BaseModel):
    k: int = Field(ge=1)
    mode: str


class OutlierRequest(BaseModel):
    point_ids: list[int]
    action: str  # "mark" | "unmark"


class Session:
    def __init__(self, sid: str, name: str, seed: int):
        self.sid = sid
        self.name = name
        self.seed = seed
        self.status = "building"
        self.error: str | None = None
        self.lock = threading.Lock()
        # Immutable after build:
        self.projection = None
        self.graph = None
        self.geodesic = None
        self.topo = None
        self.point_heights = None
        self._dendrograms: dict[str, Dendrogram] = {}
        # Mutable cluster state:
        self.k: int | None = None
        self.mode: str | None = None
        self.marked: set[int] = set()

    def build(self, dmatrix: DissimilarityMatrix):
        try:
            self.projection = swarm_project(dmatrix, self.seed)
            self.graph = delaunay_torus(self.projection, dmatrix)
            self.geodesic = geodesic_distances(self.graph)
            self.point_heights = u_heights(self.graph)
            self.topo = render_heightmap(self.projection, self.point_heights)
            self.status = "ready"
        except Exception as exc:  # surfaced through the status endpoint
            self.error = str(exc)
            self.status = "failed"

    def dendrogram(self, mode: str) -> Dendrogram:
        if mode not in self._dendrograms:
            self._dendrograms[mode] = linkage_matrix(self.geodesic.values, mode)
        return self._dendrograms[mode]

    def cluster_payload(self) -> dict:
        """Current cut with manual marks applied as a dedicated class."""
        dendro = self.dendrogram(self.mode)
        base = dendro.cut(self.k)
        volcanoes = detect_volcanoes(self.topo, base)
        labels = base.copy()
        outlier_class = int(base.max()) + OUTLIER_CLASS_OFFSET
        for pid in self.marked:
            labels[pid] = outlier_class
        return {
            "k": self.k,
            "mode": self.mode,
            "labels": [int(v) for v in labels],
            "outliers": volcanoes,
            "marked": sorted(self.marked),
            "outlier_class": outlier_class if self.marked else None,
            "dendrogram": dendro.to_json_dict(),
        }


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, session: Session):
        with self._lock:
            self._sessions[session.sid] = session

    def get(self, sid: str) -> Session:
        with self._lock:
            session = self._sessions.get(sid)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return session


def _require_ready(session: Session):
    if session.status == "building":
        raise HTTPException(status_code=409, detail="projection job still running")
    if session.status == "failed":
        raise HTTPException(status_code=500, detail=f"build failed: {session.error}")


def create_app(frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="swarmmap", version=__version__)
    store = SessionStore()
    app.state.store = store

    @app.post("/v1/sessions", status_code=202)
    def create_session(req: SessionRequest):
        if (req.points is None) == (req.matrix is None):
            raise HTTPException(status_code=422,
                                detail="provide exactly one of points or matrix")
        try:
            if req.points is not None:
                ds = Dataset(np.asarray(req.points, dtype=float),
                             np.asarray(req.labels, dtype=int) if req.labels else None,
                             name=req.name)
                dmatrix = euclidean_dissimilarity(ds)
            else:
                dmatrix = DissimilarityMatrix(np.asarray(req.matrix, dtype=float))
        except SwarmMapError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        session = Session(uuid.uuid4().hex, req.name, req.seed)
        store.create(session)
        threading.Thread(target=session.build, args=(dmatrix,), daemon=True).start()
        return {"session_id": session.sid, "status": session.status}

    @app.get("/v1/sessions/{sid}")
    def session_status(sid: str):
        session = store.get(sid)
        return {
            "session_id": session.sid,
            "name": session.name,
            "seed": session.seed,
            "status": session.status,
            "error": session.error,
            "n_points": None if session.projection is None else session.projection.n,
        }

    @app.get("/v1/sessions/{sid}/projection")
    def get_projection(sid: str):
        session = store.get(sid)
        _require_ready(session)
        return JSONResponse(session.projection.to_json_dict())

    @app.get("/v1/sessions/{sid}/map")
    def get_map(sid: str):
        session = store.get(sid)
        _require_ready(session)
        return JSONResponse(session.topo.to_json_dict())

    @app.get("/v1/sessions/{sid}/dendrogram")
    def get_dendrogram(sid: str, mode: str = "compact"):
        session = store.get(sid)
        _require_ready(session)
        if mode not in MODES:
            raise HTTPException(status_code=422,
                                detail=f"mode must be one of {MODES}")
        return JSONResponse(session.dendrogram(mode).to_json_dict())

    @app.post("/v1/sessions/{sid}/cluster")
    def post_cluster(sid: str, req: ClusterRequest):
        session = store.get(sid)
        _require_ready(session)
        if req.mode not in MODES:
            raise HTTPException(status_code=422,
                                detail=f"mode must be one of {MODES}")
        if not (1 <= req.k <= session.projection.n):
            raise HTTPException(status_code=422,
                                detail=f"k must be in [1, {session.projection.n}]")
        with session.lock:
            session.k = req.k
            session.mode = req.mode
            return JSONResponse(session.cluster_payload())

    @app.post("/v1/sessions/{sid}/outliers")
    def post_outliers(sid: str, req: OutlierRequest):
        session = store.get(sid)
        _require_ready(session)
        if req.action not in ("mark", "unmark"):
            raise HTTPException(status_code=422,
                                detail="action must be 'mark' or 'unmark'")
        if session.k is None:
            raise HTTPException(status_code=422,
                                detail="cluster the session before marking outliers")
        bad = [p for p in req.point_ids
               if not (0 <= p < session.projection.n)]
        if bad:
            raise HTTPException(status_code=422,
                                detail=f"point ids out of range: {bad}")
        with session.lock:
            if req.action == "mark":
                session.marked.update(req.point_ids)
            else:
                session.marked.difference_update(req.point_ids)
            return JSONResponse(session.cluster_payload())

    @app.get("/v1/sessions/{sid}/export")
    def export_session(sid: str):
        session = store.get(sid)
        _require_ready(session)
        bundle = {
            "session": {
                "session_id": session.sid,
                "name": session.name,
                "seed": session.seed,
                "package_version": __version__,
            },
            "projection": session.projection.to_json_dict(),
            "graph_edges": [
                {"a": int(a), "b": int(b), "weight": float(w)}
                for (a, b), w in zip(session.graph.edges, session.graph.weights)
            ],
            "topomap": session.topo.to_json_dict(),
            "cluster": session.cluster_payload() if session.k is not None else None,
        }
        return JSONResponse(bundle)

    if frontend_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        frontend_dir = candidate if candidate.exists() else None
    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="ui")
    return app
