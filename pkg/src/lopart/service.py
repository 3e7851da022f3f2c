"""Session-oriented HTTP+JSON API for interactive labeling.

Endpoints:

* ``POST /api/sequences`` ``{values: [...]}`` -> ``{id}``
* ``GET /api/sequences/{id}`` -> ``{values, labels, version}``
* ``PUT /api/sequences/{id}/labels`` ``{labels: [{start,end,changes}]}``
  -> ``{version}``
* ``GET /api/sequences/{id}/fit?penalty=P&algorithm=A`` -> fit object
* ``GET /api/health`` -> ``{status: "ok"}``

Errors are JSON ``{error, detail}``: 4xx for validation problems, 5xx
for internal failures.  Sessions live in memory; label replacement is
an atomic read-modify-write under a per-session lock and bumps the
session version, while fits solve on an immutable snapshot and report
the version they used, so they may run concurrently with mutations.
Static UI assets, when built, are served at ``/``.
"""

from __future__ import annotations

import json
import math
import os
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .core import (
    DataSequence,
    LabelSet,
    LabelValidationError,
    lopart,
    lopart_infinite,
    opart,
    validate_labels,
)
from .metrics import classify_label

__all__ = ["create_app", "DEFAULT_MAX_LENGTH"]

DEFAULT_MAX_LENGTH = 1_000_000


@dataclass
class Session:
    id: str
    sequence: DataSequence
    labels: LabelSet
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SequenceBody(BaseModel):
    values: list[float]


class LabelBody(BaseModel):
    start: int
    end: int
    changes: int


class LabelsBody(BaseModel):
    labels: list[LabelBody]


def _error(status: int, error: str, detail: str) -> JSONResponse:
    return JSONResponse({"error": error, "detail": detail}, status_code=status)


def create_app(
    corpus=None,
    static_dir: str | None = None,
    snapshot_dir: str | None = None,
    max_length: int = DEFAULT_MAX_LENGTH,
) -> FastAPI:
    """Build the service; ``corpus`` items become preloaded sessions."""

    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    if corpus:
        for item in corpus:
            sessions[item.sequence_id] = Session(
                item.sequence_id, item.data, item.labels
            )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        if snapshot_dir:
            _snapshot_sessions(snapshot_dir, sessions)

    app = FastAPI(lifespan=lifespan)
    app.state.sessions = sessions

    @app.exception_handler(RequestValidationError)
    async def _on_bad_request(request: Request, exc: RequestValidationError):
        return _error(400, "validation_error", str(exc.errors()))

    @app.exception_handler(Exception)
    async def _on_internal(request: Request, exc: Exception):
        return _error(500, "internal_error", f"{type(exc).__name__}: {exc}")

    def _get_session(session_id: str) -> Session | None:
        with store_lock:
            return sessions.get(session_id)

    @app.get("/api/health")
    async def health():
        return {"status": "ok"}

    @app.post("/api/sequences")
    async def create_sequence(body: SequenceBody):
        if not body.values:
            return _error(400, "validation_error", "values must be nonempty")
        if len(body.values) > max_length:
            return _error(
                400,
                "validation_error",
                f"sequence length {len(body.values)} exceeds cap {max_length}",
            )
        if not all(math.isfinite(v) for v in body.values):
            return _error(400, "validation_error", "values must all be finite")
        seq = DataSequence(np.asarray(body.values, dtype=float))
        session = Session(uuid.uuid4().hex, seq, validate_labels([], seq.n))
        with store_lock:
            sessions[session.id] = session
        return {"id": session.id}

    @app.get("/api/sequences/{session_id}")
    async def get_sequence(session_id: str):
        session = _get_session(session_id)
        if session is None:
            return _error(404, "not_found", f"no session {session_id!r}")
        with session.lock:
            labels, version = session.labels, session.version
        return {
            "values": [float(v) for v in session.sequence.values],
            "labels": [
                {"start": lab.start, "end": lab.end, "changes": lab.changes}
                for lab in labels.labels
            ],
            "version": version,
        }

    @app.put("/api/sequences/{session_id}/labels")
    async def put_labels(session_id: str, body: LabelsBody):
        session = _get_session(session_id)
        if session is None:
            return _error(404, "not_found", f"no session {session_id!r}")
        try:
            label_set = validate_labels(
                [(lab.start, lab.end, lab.changes) for lab in body.labels],
                session.sequence.n,
            )
        except LabelValidationError as exc:
            detail = str(exc)
            if exc.index is not None:
                detail = f"label index {exc.index}: {detail}"
            return _error(400, "invalid_labels", detail)
        with session.lock:
            session.labels = label_set
            session.version += 1
            version = session.version
        return {"version": version}

    @app.get("/api/sequences/{session_id}/fit")
    async def get_fit(session_id: str, penalty: str, algorithm: str = "lopart"):
        session = _get_session(session_id)
        if session is None:
            return _error(404, "not_found", f"no session {session_id!r}")
        if algorithm not in ("opart", "lopart"):
            return _error(
                400, "validation_error", f"unknown algorithm {algorithm!r}"
            )
        infinite = penalty.strip().lower() == "inf"
        lam = math.inf
        if not infinite:
            try:
                lam = float(penalty)
            except ValueError:
                return _error(
                    400, "validation_error", f"penalty must be a number or 'inf'"
                )
            if not math.isfinite(lam) or lam < 0:
                return _error(
                    400, "validation_error", f"penalty must be >= 0, got {penalty!r}"
                )
        if infinite and algorithm == "opart":
            return _error(
                400,
                "validation_error",
                "infinite penalty is only defined for the constrained solver",
            )
        with session.lock:
            seq, labels, version = session.sequence, session.labels, session.version
        if algorithm == "opart":
            seg = opart(seq, lam)
        elif infinite:
            seg = lopart_infinite(seq, labels)
        else:
            seg = lopart(seq, labels, lam)
        outcomes = [
            classify_label(lab, seg.changepoints, i)
            for i, lab in enumerate(labels.labels)
        ]
        return {
            "changepoints": list(seg.changepoints),
            "segments": [
                {"start": start, "end": end, "mean": mean}
                for start, end, mean in seg.segments(seq.n)
            ],
            "cost": seg.cost,
            "penalty": "inf" if infinite else lam,
            "algorithm": algorithm,
            "label_outcomes": [
                {
                    "label_index": outcome.label_index,
                    "start": labels.labels[outcome.label_index].start,
                    "end": labels.labels[outcome.label_index].end,
                    "changes": labels.labels[outcome.label_index].changes,
                    "predicted_changes": outcome.predicted_changes,
                    "status": outcome.status,
                    "is_true_positive": outcome.is_true_positive,
                }
                for outcome in outcomes
            ],
            "version": version,
        }

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _snapshot_sessions(directory: str, sessions: dict[str, Session]) -> None:
    os.makedirs(directory, exist_ok=True)
    for session in sessions.values():
        with session.lock:
            payload = {
                "id": session.id,
                "values": [float(v) for v in session.sequence.values],
                "labels": session.labels.as_tuples(),
                "version": session.version,
            }
        path = os.path.join(directory, f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle)
