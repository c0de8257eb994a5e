"""HTTP+JSON API over the orchestrator. Poll model: handlers never block on
job completion."""

from __future__ import annotations

import os
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .orchestrator import NotFoundError, Orchestrator, SessionStateError

__all__ = ["create_app"]


class MessageBody(BaseModel):
    text: str


class AdjustmentBody(BaseModel):
    ops: list


def create_app(orchestrator: Optional[Orchestrator] = None) -> FastAPI:
    if orchestrator is None:
        data_dir = os.environ.get("CIMDSE_DATA_DIR", "cimdse_data")
        orchestrator = Orchestrator(data_dir, run_async=True)
    app = FastAPI(title="cimdse")
    app.state.orchestrator = orchestrator

    def _wrap(fn, *args):
        try:
            return fn(*args)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except SessionStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session():
        session = orchestrator.create_session()
        return session.to_json()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _wrap(orchestrator.get_session, session_id).to_json()

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        return _wrap(orchestrator.submit, session_id, body.text)

    @app.post("/sessions/{session_id}/adjustments")
    def post_adjustment(session_id: str, body: AdjustmentBody):
        return _wrap(orchestrator.adjust, session_id, body.ops)

    @app.post("/sessions/{session_id}/confirm")
    def confirm(session_id: str):
        return _wrap(orchestrator.confirm, session_id).to_json()

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return _wrap(orchestrator.get_job, job_id).to_json()

    @app.get("/jobs/{job_id}/results")
    def get_results(job_id: str):
        return _wrap(orchestrator.results, job_id)

    return app
