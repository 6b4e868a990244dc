"""Wires every component into one runnable agent.

The runtime owns the graph store, gazetteer, recognizers and template
sets per language, the dialogue manager, the session table, and the
optional ingestion scheduler. The HTTP app and the CLI are both thin
clients of this object.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from newsagent.dialogue import (
    DialogueManager,
    DialogueSession,
    Prosody,
    UnsupportedLanguageError,
)
from newsagent.graph import GraphStore
from newsagent.ingest import FeedSource, IngestReport, Scheduler, ingest_source
from newsagent.linking import (
    FallbackLinker,
    Gazetteer,
    GazetteerLinker,
    RemoteLinker,
    load_gazetteer,
)
from newsagent.nlu import IntentRecognizer, IntentResult, load_intent_config, intent_config_from_mapping
from newsagent.query import TemplateRegistry
from newsagent.response import (
    AgentResponse,
    ResponseTemplateSet,
    builtin_templates,
    load_templates,
    render,
)
from newsagent.service.config import ServiceConfig

logger = logging.getLogger(__name__)


class SessionNotFoundError(Exception):
    """Unknown or expired session id with auto-create disabled."""


class UnknownSourceError(Exception):
    """No configured feed source under the requested id."""


class StoreUnavailableError(Exception):
    """The graph store cannot serve requests (snapshot swap in progress)."""


@dataclass
class TurnRecord:
    user_text: str
    response_text: str
    intent: str
    confidence: float
    at: float = field(default_factory=time.time)


class AgentRuntime:
    def __init__(self, config: Optional[ServiceConfig] = None):
        self.config = config or ServiceConfig()
        self.store = GraphStore()
        self.gazetteer: Optional[Gazetteer] = None
        if self.config.gazetteer_path:
            self.gazetteer = load_gazetteer(self.config.gazetteer_path)

        if self.config.query_templates_path:
            self.registry = TemplateRegistry.from_file(self.config.query_templates_path)
        else:
            self.registry = TemplateRegistry.builtin()

        self.recognizers: Dict[str, IntentRecognizer] = {}
        self.templates: Dict[str, ResponseTemplateSet] = {}
        for lang in self.config.languages:
            intent_path = self.config.intent_config_paths.get(lang)
            if intent_path:
                intent_config = load_intent_config(intent_path)
            else:
                text = (
                    resources.files("newsagent")
                    .joinpath(f"assets/intents_{lang}.json")
                    .read_text("utf-8")
                )
                intent_config = intent_config_from_mapping(json.loads(text))
            self.recognizers[lang] = IntentRecognizer(intent_config)
            template_path = self.config.response_template_paths.get(lang)
            self.templates[lang] = (
                load_templates(template_path) if template_path else builtin_templates(lang)
            )

        self.dialogue = DialogueManager(
            store=self.store,
            registry=self.registry,
            gazetteer=self.gazetteer,
            languages=tuple(self.config.languages),
            page_size=self.config.page_size,
            max_results=self.config.max_results,
            related_entity_weight=self.config.related_entity_weight,
            related_tag_weight=self.config.related_tag_weight,
        )

        self._linker = self._build_linker()
        self._sessions: Dict[str, DialogueSession] = {}
        self._transcripts: Dict[str, List[TurnRecord]] = {}
        self._session_locks: Dict[str, threading.Lock] = {}
        self._table_lock = threading.Lock()
        self.scheduler: Optional[Scheduler] = None

        if self.config.snapshot_path and Path(self.config.snapshot_path).exists():
            self.store = GraphStore.snapshot_load(self.config.snapshot_path)
            self.dialogue.store = self.store

    def _build_linker(self):
        gazetteer = self.gazetteer or Gazetteer([])
        local = GazetteerLinker(gazetteer, self.config.min_confidence)
        if self.config.remote_linker_url:
            remote = RemoteLinker(self.config.remote_linker_url)
            return FallbackLinker(remote, gazetteer, self.config.min_confidence)
        return local

    # -- lifecycle ----------------------------------------------------------

    def start(self):
        """Initial ingest plus the hourly scheduler, per configuration."""
        if self.config.ingest_on_start:
            for source in self.config.sources:
                try:
                    report = self.trigger_ingest(source.id)
                    logger.info(
                        "initial ingest of %s: created=%d merged=%d rejected=%d",
                        source.id, report.created, report.merged, len(report.rejected),
                    )
                except Exception:
                    logger.exception("initial ingest of %s failed", source.id)
        if self.config.scheduler_enabled and self.config.sources:
            self.scheduler = Scheduler(self.config.sources, self._scheduled_job)
            self.scheduler.start()

    def _scheduled_job(self, source: FeedSource):
        ingest_source(source, self._linker, self.store)

    def shutdown(self):
        if self.scheduler is not None:
            self.scheduler.stop()
        if self.config.snapshot_path:
            self.store.snapshot_save(self.config.snapshot_path)

    # -- sessions -----------------------------------------------------------

    def create_session(
        self, language: Optional[str] = None
    ) -> Tuple[DialogueSession, AgentResponse]:
        lang = language or self.config.default_language
        prosody = Prosody(rate=self.config.default_rate, voice=self.config.default_voice)
        session, actions = self.dialogue.new_session(lang, prosody)
        response = render(actions, self.templates[lang], session.prosody)
        with self._table_lock:
            self._sessions[session.session_id] = session
            self._transcripts[session.session_id] = []
            self._session_locks[session.session_id] = threading.Lock()
        return session, response

    def _get_session(self, session_id: str) -> DialogueSession:
        with self._table_lock:
            session = self._sessions.get(session_id)
            if session is not None:
                idle = time.time() - session.last_active
                if idle > self.config.session_idle_timeout_s:
                    self._drop_session(session_id)
                    session = None
            if session is not None:
                return session
        if not self.config.auto_create_sessions:
            raise SessionNotFoundError(f"no session {session_id!r}")
        session, _ = self.dialogue.new_session(self.config.default_language)
        session.session_id = session_id
        with self._table_lock:
            self._sessions[session_id] = session
            self._transcripts.setdefault(session_id, [])
            self._session_locks[session_id] = threading.Lock()
        return session

    def _drop_session(self, session_id: str):
        self._sessions.pop(session_id, None)
        self._transcripts.pop(session_id, None)
        self._session_locks.pop(session_id, None)

    def get_session(self, session_id: str) -> DialogueSession:
        with self._table_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFoundError(f"no session {session_id!r}")
        return session

    def transcript(self, session_id: str) -> List[TurnRecord]:
        with self._table_lock:
            return list(self._transcripts.get(session_id, []))

    # -- the main turn ------------------------------------------------------

    def handle_utterance(self, session_id: str, text: str) -> Tuple[AgentResponse, IntentResult, DialogueSession]:
        session = self._get_session(session_id)
        with self._table_lock:
            lock = self._session_locks.setdefault(session_id, threading.Lock())
        with lock:  # turns within one session are strictly serialized
            recognizer = self.recognizers[session.language]
            intent = recognizer.recognize(text, context=session.suggestion_titles())
            session, actions = self.dialogue.handle(session, intent)
            response = render(actions, self.templates[session.language], session.prosody)
            with self._table_lock:
                transcript = self._transcripts.setdefault(session_id, [])
                transcript.append(
                    TurnRecord(
                        user_text=text,
                        response_text=response.text,
                        intent=intent.intent,
                        confidence=intent.confidence,
                    )
                )
        return response, intent, session

    # -- admin --------------------------------------------------------------

    def trigger_ingest(self, source_id: Optional[str] = None) -> IngestReport:
        if source_id is None:
            if not self.config.sources:
                raise UnknownSourceError("no sources configured")
            source = self.config.sources[0]
        else:
            matches = [s for s in self.config.sources if s.id == source_id]
            if not matches:
                raise UnknownSourceError(f"no source {source_id!r}")
            source = matches[0]
        return ingest_source(source, self._linker, self.store)

    def ingest_file(self, path: str, source_id: str = "file") -> IngestReport:
        source = FeedSource(id=source_id, kind="file", location=str(path))
        return ingest_source(source, self._linker, self.store)

    def stats(self) -> dict:
        return self.store.stats()
