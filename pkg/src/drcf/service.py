"""JSON-over-HTTP service exposing fitted sessions, embeddings, explanation
and attribution queries. Stateless beyond the read-only session store."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .core import CfRequest, SolverOptions, project
from .diverse import aggregate_attribution, diverse_counterfactuals
from .errors import DrcfError, InputError, SolverError
from .sessions import API_VERSION, SessionStore


def _error(status: int, code: str, message: str, detail: str = ""):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(session_dir: str) -> FastAPI:
    store = SessionStore(session_dir)
    app = FastAPI(title="drcf service")

    @app.exception_handler(DrcfError)
    async def _drcf_error(request: Request, exc: DrcfError):
        if isinstance(exc, SolverError):
            return _error(409, "solver_error", str(exc))
        return _error(400, "input_error", str(exc))

    def _get_session(session_id: str):
        sess = store.get(session_id)
        if sess is None:
            return None
        return sess

    @app.get("/sessions")
    def list_sessions():
        out = []
        for sid in store.ids():
            sess = store.get(sid)
            out.append(
                {
                    "session_id": sid,
                    "kind": sess.projector.kind,
                    "d": sess.projector.d,
                    "d_out": sess.projector.d_out,
                    "n_samples": sess.dataset.m,
                    "feature_names": list(sess.dataset.feature_names),
                }
            )
        return {"api_version": API_VERSION, "sessions": out}

    @app.get("/sessions/{session_id}/embedding")
    def embedding(session_id: str):
        sess = _get_session(session_id)
        if sess is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        pts = [project(sess.projector, x) for x in sess.dataset.X]
        points = [list(p) if isinstance(p, tuple) else np.asarray(p).tolist() for p in pts]
        body = {
            "api_version": API_VERSION,
            "kind": sess.projector.kind,
            "points": points,
            "labels": sess.dataset.labels.tolist(),
            "feature_names": list(sess.dataset.feature_names),
        }
        if sess.projector.kind == "som":
            body["grid_shape"] = list(sess.projector.shape)
        return body

    @app.post("/sessions/{session_id}/explain")
    async def explain(session_id: str, request: Request):
        sess = _get_session(session_id)
        if sess is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        body = await request.json()
        if "x" in body:
            x = np.asarray(body["x"], dtype=np.float64)
        elif "sample_index" in body:
            idx = int(body["sample_index"])
            if not (0 <= idx < sess.dataset.m):
                raise InputError(f"sample_index {idx} out of range")
            x = sess.dataset.X[idx]
        else:
            raise InputError("body must contain 'x' or 'sample_index'")
        if "y_cf" not in body:
            raise InputError("body must contain 'y_cf'")
        y_cf = body["y_cf"]
        y_cf = tuple(int(v) for v in y_cf) if sess.projector.kind == "som" else np.asarray(y_cf, dtype=np.float64)
        req = CfRequest(
            x_orig=x,
            y_cf=y_cf,
            blacklist=tuple(body.get("blacklist", ())),
            C=float(body.get("C", 100.0)),
            opts=SolverOptions(),
        )
        es = diverse_counterfactuals(req, int(body.get("k", 3)), sess.projector)
        out = es.to_json_dict()
        out["api_version"] = API_VERSION
        return out

    @app.post("/sessions/{session_id}/attribution")
    async def attribution(session_id: str, request: Request):
        sess = _get_session(session_id)
        if sess is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        body = await request.json()
        if "sample_index" not in body:
            raise InputError("body must contain 'sample_index'")
        idx = int(body["sample_index"])
        if not (0 <= idx < sess.dataset.m):
            raise InputError(f"sample_index {idx} out of range")
        targets = body.get("targets")
        if not targets:
            raise InputError("body must contain a nonempty 'targets' list")
        if sess.projector.kind == "som":
            targets = [tuple(int(v) for v in t) for t in targets]
        else:
            targets = [np.asarray(t, dtype=np.float64) for t in targets]
        weights, n_failed, uniform = aggregate_attribution(
            sess.dataset.X[idx], targets, sess.projector, C=float(body.get("C", 100.0))
        )
        return {
            "api_version": API_VERSION,
            "weights": weights.tolist(),
            "feature_names": list(sess.dataset.feature_names),
            "n_failed": n_failed,
            "uniform_fallback": uniform,
        }

    return app
