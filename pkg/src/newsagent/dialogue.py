"""Session state machine: intents in, dialogue actions out.

Search intents come in three levels (general overview, one resort,
one entity); navigation intents page through suggestions and select
them by ordinal or headline keyword. The manager only ever reads the
graph; every failure surfaces as a Say action with an explanatory text
key, never as an exception to the user.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

from newsagent.graph import GraphStore, NodeLabel
from newsagent.linking import Gazetteer
from newsagent.nlu import IntentResult
from newsagent.query import TemplateRegistry, related_articles

DEFAULT_PAGE_SIZE = 3
DEFAULT_MAX_RESULTS = 30
DEFAULT_IDLE_TIMEOUT_S = 30 * 60


class UnsupportedLanguageError(Exception):
    """Requested language has no shipped configuration."""


class DialogueState(str, Enum):
    IDLE = "Idle"
    BROWSING = "Browsing"
    READING = "Reading"


@dataclass(frozen=True)
class Suggestion:
    key: str
    title: str


@dataclass(frozen=True)
class Prosody:
    rate: float = 1.0
    voice: Optional[str] = None


@dataclass
class DialogueSession:
    session_id: str
    language: str
    state: DialogueState = DialogueState.IDLE
    suggestions: List[Suggestion] = field(default_factory=list)
    page_offset: int = 0
    current_article: Optional[str] = None
    prosody: Prosody = field(default_factory=Prosody)
    created_at: float = field(default_factory=time.time)
    last_active: float = field(default_factory=time.time)
    # query behind the current suggestion list, re-run when paging
    active_query: Optional[Dict[str, object]] = None

    def suggestion_titles(self) -> List[str]:
        return [s.title for s in self.suggestions]


# -- actions ------------------------------------------------------------


@dataclass(frozen=True)
class Say:
    text_key: str
    params: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class SuggestArticles:
    items: Tuple[Suggestion, ...]  # numbered 1..n in listing order
    related: bool = False

    def __post_init__(self):
        if not self.items:
            raise ValueError("SuggestArticles payload must be non-empty")


@dataclass(frozen=True)
class ReadArticle:
    article_key: str
    title: str
    text: str
    part: str = "opening"  # opening | body


@dataclass(frozen=True)
class PlaybackDirective:
    directive: str  # next | again | pause | play

    def __post_init__(self):
        if self.directive not in ("next", "again", "pause", "play"):
            raise ValueError(f"unknown directive {self.directive!r}")


@dataclass(frozen=True)
class Help:
    pass


@dataclass(frozen=True)
class Goodbye:
    pass


DialogueAction = Union[Say, SuggestArticles, ReadArticle, PlaybackDirective, Help, Goodbye]


def _say(key: str, **params: str) -> Say:
    return Say(key, tuple(sorted(params.items())))


class DialogueManager:
    """Turns recognized intents into actions against one graph store."""

    def __init__(
        self,
        store: GraphStore,
        registry: TemplateRegistry,
        gazetteer: Optional[Gazetteer] = None,
        languages: Sequence[str] = ("en", "de"),
        page_size: int = DEFAULT_PAGE_SIZE,
        max_results: int = DEFAULT_MAX_RESULTS,
        related_entity_weight: int = 2,
        related_tag_weight: int = 1,
    ):
        self.store = store
        self.registry = registry
        self.gazetteer = gazetteer
        self.languages = tuple(languages)
        self.page_size = page_size
        self.max_results = max_results
        self.related_entity_weight = related_entity_weight
        self.related_tag_weight = related_tag_weight

    # -- session lifecycle ------------------------------------------------

    def new_session(
        self, language: str, prosody: Optional[Prosody] = None
    ) -> Tuple[DialogueSession, List[DialogueAction]]:
        if language not in self.languages:
            raise UnsupportedLanguageError(f"unsupported language {language!r}")
        session = DialogueSession(
            session_id=uuid.uuid4().hex,
            language=language,
            prosody=prosody or Prosody(),
        )
        return session, [_say("greeting")]

    # -- main transition function -----------------------------------------

    def handle(
        self, session: DialogueSession, intent: IntentResult
    ) -> Tuple[DialogueSession, List[DialogueAction]]:
        handler = getattr(self, f"_on_{intent.intent}", None)
        session.last_active = time.time()
        if handler is None:
            return session, [_say("fallback_hint")]
        return handler(session, intent)

    # -- search intents -----------------------------------------------------

    def _run_query(self, name: str, params: Dict[str, object]) -> List[Suggestion]:
        rows = self.registry.run(name, params, self.store)
        out = []
        for row in rows:
            node = row["a"] if "a" in row else next(iter(row.values()))
            out.append(Suggestion(key=node.key, title=node.properties.get("title", node.key)))
        return out

    def _fetch_results(self, session: DialogueSession) -> List[Suggestion]:
        query = session.active_query or {}
        if query.get("kind") == "related":
            ranked = related_articles(
                str(query["key"]),
                self.max_results,
                self.store,
                self.related_entity_weight,
                self.related_tag_weight,
            )
            return [
                Suggestion(key=snap.key, title=snap.properties.get("title", snap.key))
                for snap, _ in ranked
            ]
        if query.get("kind") == "template":
            return self._run_query(str(query["name"]), dict(query["params"]))
        return []

    def _show_page(
        self, session: DialogueSession, results: List[Suggestion], offset: int
    ) -> List[DialogueAction]:
        page = results[offset : offset + self.page_size]
        session.suggestions = list(page)
        session.page_offset = offset
        session.state = DialogueState.BROWSING
        session.current_article = None
        return [SuggestArticles(tuple(page))]

    def _start_browse(
        self,
        session: DialogueSession,
        query: Dict[str, object],
        empty_key: str,
        **empty_params: str,
    ) -> Tuple[DialogueSession, List[DialogueAction]]:
        session.active_query = query
        results = self._fetch_results(session)
        if not results:
            session.active_query = None
            return session, [_say(empty_key, **empty_params)]
        return session, self._show_page(session, results, 0)

    def _on_overview(self, session, intent):
        return self._start_browse(
            session, {"kind": "template", "name": "overview", "params": {}}, "no_articles"
        )

    def _on_list_resorts(self, session, intent):
        rows = self.registry.run("list_resorts", {}, self.store)
        if not rows:
            return session, [_say("no_articles")]
        names = [row["r"].properties.get("display_name", row["r"].key) for row in rows]
        return session, [_say("resort_list", names=", ".join(names))]

    def _on_resort_search(self, session, intent):
        name = intent.slots.get("resort", "").strip()
        if not name:
            return session, [_say("resort_missing")]
        folded = name.casefold()
        if not self.store.has_node(NodeLabel.RESORT, folded):
            return session, [_say("unknown_resort", name=name)]
        query = {
            "kind": "template",
            "name": "articles_by_resort",
            "params": {"name": folded, "n": self.max_results},
        }
        return self._start_browse(session, query, "no_articles_for", name=name)

    def _resolve_entity(self, text: str) -> Optional[str]:
        """Entity id for slot text: gazetteer alias, then graph entity name."""
        if self.gazetteer is not None:
            entry = self.gazetteer.lookup_alias(text)
            if entry is not None and self.store.has_node(NodeLabel.ENTITY, entry.wiki_data_item_id):
                return entry.wiki_data_item_id
        folded = text.casefold()
        for handle in self.store.nodes(NodeLabel.ENTITY):
            if self.store.node_props(handle).get("name", "").casefold() == folded:
                return handle.key
        return None

    def _on_entity_search(self, session, intent):
        text = intent.slots.get("entity_text", "").strip()
        if not text:
            return session, [_say("entity_missing")]
        entity_id = self._resolve_entity(text)
        if entity_id is not None:
            query = {
                "kind": "template",
                "name": "articles_by_entity",
                "params": {"id": entity_id, "n": self.max_results},
            }
            return self._start_browse(session, query, "no_articles_for", name=text)
        # last resort: treat the text as an editorial tag
        if self.store.has_node(NodeLabel.TAG, text.casefold()):
            query = {
                "kind": "template",
                "name": "articles_by_tag",
                "params": {"name": text.casefold(), "n": self.max_results},
            }
            return self._start_browse(session, query, "no_articles_for", name=text)
        return session, [_say("no_entity_found", name=text)]

    # -- navigation intents ---------------------------------------------------

    def _on_select_suggestion(self, session, intent):
        if not session.suggestions:
            return session, [_say("no_suggestions")]
        if intent.slots.get("ambiguous") == "true":
            return session, [_say("which_one")]
        try:
            ordinal = int(intent.slots.get("ordinal", ""))
        except ValueError:
            return session, [_say("which_one")]
        if not 1 <= ordinal <= len(session.suggestions):
            return session, [_say("out_of_range", count=str(len(session.suggestions)))]
        chosen = session.suggestions[ordinal - 1]
        return self._read_article(session, chosen.key, "opening")

    def _read_article(self, session, article_key: str, part: str):
        handle = self.store.node(NodeLabel.ARTICLE, article_key)
        if handle is None:
            return session, [_say("no_suggestions")]
        props = self.store.node_props(handle)
        text = props.get("opening_paragraph") if part == "opening" else props.get("body")
        actions: List[DialogueAction] = [
            ReadArticle(
                article_key=article_key,
                title=props.get("title", article_key),
                text=text or props.get("opening_paragraph", ""),
                part=part,
            )
        ]
        session.state = DialogueState.READING
        session.current_article = article_key
        related = related_articles(
            article_key,
            self.max_results,
            self.store,
            self.related_entity_weight,
            self.related_tag_weight,
        )
        if related:
            session.active_query = {"kind": "related", "key": article_key}
            page = [
                Suggestion(key=snap.key, title=snap.properties.get("title", snap.key))
                for snap, _ in related[: self.page_size]
            ]
            session.suggestions = page
            session.page_offset = 0
            actions.append(SuggestArticles(tuple(page), related=True))
        return session, actions

    def _on_read_full(self, session, intent):
        if session.state is not DialogueState.READING or session.current_article is None:
            return session, [_say("nothing_to_read")]
        return self._read_article(session, session.current_article, "body")

    def _on_more_suggestions(self, session, intent):
        if session.active_query is None:
            return session, [_say("no_suggestions")]
        results = self._fetch_results(session)
        offset = session.page_offset + self.page_size
        if offset >= len(results):
            return session, [_say("no_more_suggestions")]
        reading = session.state is DialogueState.READING
        current = session.current_article
        actions = self._show_page(session, results, offset)
        if reading:  # paging related articles keeps the open article readable
            session.state = DialogueState.READING
            session.current_article = current
        return session, actions

    # -- smalltalk and control ---------------------------------------------

    def _on_greeting(self, session, intent):
        return session, [_say("greeting")]

    def _on_help(self, session, intent):
        return session, [Help()]

    def _on_goodbye(self, session, intent):
        session.state = DialogueState.IDLE
        session.suggestions = []
        session.page_offset = 0
        session.current_article = None
        session.active_query = None
        return session, [Goodbye()]

    def _on_fallback(self, session, intent):
        return session, [_say("fallback_hint")]

    def _on_control_next(self, session, intent):
        return session, [PlaybackDirective("next")]

    def _on_control_again(self, session, intent):
        return session, [PlaybackDirective("again")]

    def _on_control_pause(self, session, intent):
        return session, [PlaybackDirective("pause")]

    def _on_control_play(self, session, intent):
        return session, [PlaybackDirective("play")]
