"""FastAPI application exposing the session and admin endpoints."""

from __future__ import annotations

import os
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from newsagent.dialogue import UnsupportedLanguageError
from newsagent.ingest import FeedError
from newsagent.service.config import ServiceConfig, load_config
from newsagent.service.runtime import (
    AgentRuntime,
    SessionNotFoundError,
    StoreUnavailableError,
    UnknownSourceError,
)
from newsagent.service.schemas import (
    AgentResponseModel,
    CreateSessionRequest,
    CreateSessionResponse,
    IngestReportModel,
    IngestRequest,
    SessionSummary,
    StatsResponse,
    UtteranceRequest,
)


def create_app(runtime: Optional[AgentRuntime] = None) -> FastAPI:
    """Build the app; without a runtime, config comes from NEWSAGENT_CONFIG."""
    if runtime is None:
        config_path = os.environ.get("NEWSAGENT_CONFIG")
        runtime = AgentRuntime(load_config(config_path) if config_path else ServiceConfig())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        yield
        runtime.shutdown()

    app = FastAPI(title="newsagent", lifespan=lifespan)
    app.state.runtime = runtime

    @app.post("/sessions", response_model=CreateSessionResponse, status_code=201)
    def create_session(request: CreateSessionRequest):
        try:
            session, response = runtime.create_session(request.language)
        except UnsupportedLanguageError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return CreateSessionResponse(
            session_id=session.session_id,
            response=AgentResponseModel.build(response),
        )

    @app.post("/sessions/{session_id}/utterance", response_model=AgentResponseModel)
    def utterance(session_id: str, request: UtteranceRequest):
        try:
            response, intent, session = runtime.handle_utterance(session_id, request.text)
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except StoreUnavailableError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return AgentResponseModel.build(
            response,
            intent=intent,
            session=session,
            include_debug=runtime.config.debug_responses,
        )

    @app.get("/sessions/{session_id}", response_model=SessionSummary)
    def session_summary(session_id: str):
        try:
            session = runtime.get_session(session_id)
        except SessionNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return SessionSummary.build(session, turns=len(runtime.transcript(session_id)))

    @app.post("/admin/ingest", response_model=IngestReportModel)
    def admin_ingest(request: IngestRequest):
        try:
            report = runtime.trigger_ingest(request.source_id)
        except UnknownSourceError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except FeedError as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from exc
        return IngestReportModel(**report.as_dict())

    @app.get("/graph/stats", response_model=StatsResponse)
    def graph_stats():
        return StatsResponse(**runtime.stats())

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz():
        return "ok"

    webapp_dir = runtime.config.webapp_dir
    if webapp_dir and Path(webapp_dir).is_dir():
        app.mount("/app", StaticFiles(directory=webapp_dir, html=True), name="webapp")

    return app
