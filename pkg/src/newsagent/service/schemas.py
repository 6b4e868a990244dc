"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from newsagent.dialogue import DialogueSession
from newsagent.nlu import IntentResult
from newsagent.response import AgentResponse


class CreateSessionRequest(BaseModel):
    language: Optional[str] = None


class UtteranceRequest(BaseModel):
    text: str = Field(min_length=1)


class SuggestionModel(BaseModel):
    number: int
    key: str
    title: str


class DebugBlock(BaseModel):
    intent: str
    confidence: float
    session_state: str


class AgentResponseModel(BaseModel):
    text: str
    ssml: str
    suggestions: List[SuggestionModel] = []
    directives: List[str] = []
    debug: Optional[DebugBlock] = None

    @classmethod
    def build(
        cls,
        response: AgentResponse,
        intent: Optional[IntentResult] = None,
        session: Optional[DialogueSession] = None,
        include_debug: bool = False,
    ) -> "AgentResponseModel":
        debug = None
        if include_debug and intent is not None and session is not None:
            debug = DebugBlock(
                intent=intent.intent,
                confidence=intent.confidence,
                session_state=session.state.value,
            )
        return cls(
            text=response.text,
            ssml=response.ssml,
            suggestions=[
                SuggestionModel(number=s.number, key=s.key, title=s.title)
                for s in response.suggestions
            ],
            directives=list(response.directives),
            debug=debug,
        )


class CreateSessionResponse(BaseModel):
    session_id: str
    response: AgentResponseModel


class ProsodyModel(BaseModel):
    rate: float
    voice: Optional[str] = None


class SessionSummary(BaseModel):
    session_id: str
    language: str
    state: str
    suggestions: List[SuggestionModel]
    page_offset: int
    current_article: Optional[str]
    prosody: ProsodyModel
    created_at: float
    last_active: float
    turns: int

    @classmethod
    def build(cls, session: DialogueSession, turns: int) -> "SessionSummary":
        return cls(
            session_id=session.session_id,
            language=session.language,
            state=session.state.value,
            suggestions=[
                SuggestionModel(number=i + 1, key=s.key, title=s.title)
                for i, s in enumerate(session.suggestions)
            ],
            page_offset=session.page_offset,
            current_article=session.current_article,
            prosody=ProsodyModel(rate=session.prosody.rate, voice=session.prosody.voice),
            created_at=session.created_at,
            last_active=session.last_active,
            turns=turns,
        )


class IngestRequest(BaseModel):
    source_id: Optional[str] = None


class IngestReportModel(BaseModel):
    source_id: str
    fetched: int
    created: int
    merged: int
    rejected: List[Tuple[int, str]]
    entities_linked: int
    started: str
    finished: str


class StatsResponse(BaseModel):
    nodes: dict
    edges: dict
