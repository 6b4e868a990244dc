"""Render dialogue actions to plain text plus SSML.

The SSML subset is speak/p/s/break/emphasis/prosody (rate, voice).
Rendering is pure: the same actions, templates, and prosody always
yield the same response, and the plain-text field always equals the
SSML stripped of markup (modulo whitespace).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple
from xml.etree import ElementTree

from newsagent.dialogue import (
    DialogueAction,
    Goodbye,
    Help,
    PlaybackDirective,
    Prosody,
    ReadArticle,
    Say,
    SuggestArticles,
)

RATE_MIN, RATE_MAX = 0.5, 2.0
SUGGESTION_PAUSE_MS = 300

# every text key the dialogue manager can emit; the template matrix
# test checks all of them in every shipped language
TEXT_KEYS = (
    "greeting",
    "help",
    "goodbye",
    "fallback_hint",
    "suggest_intro",
    "suggest_intro_one",
    "related_intro",
    "read_full_hint",
    "resort_list",
    "unknown_resort",
    "resort_missing",
    "entity_missing",
    "no_entity_found",
    "no_articles",
    "no_articles_for",
    "no_more_suggestions",
    "no_suggestions",
    "out_of_range",
    "which_one",
    "nothing_to_read",
)


class ResponseError(Exception):
    """Base class for response rendering errors."""


class MissingTemplateError(ResponseError):
    """A text key has no template in the active language."""


class MissingPlaceholderError(ResponseError):
    """A template references a placeholder with no supplied value."""


class InvalidRateError(ResponseError):
    """Prosody rate outside the supported range."""


@dataclass(frozen=True)
class ResponseTemplateSet:
    language: str
    templates: Dict[str, str]

    def fill(self, key: str, params: Dict[str, str]) -> str:
        try:
            template = self.templates[key]
        except KeyError:
            raise MissingTemplateError(f"no template {key!r} for {self.language!r}") from None
        try:
            return template.format(**params)
        except (KeyError, IndexError) as exc:
            raise MissingPlaceholderError(f"template {key!r}: missing value {exc}") from exc


def load_templates(path) -> ResponseTemplateSet:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return ResponseTemplateSet(language=data["language"], templates=dict(data["templates"]))


def builtin_templates(language: str) -> ResponseTemplateSet:
    text = (
        resources.files("newsagent")
        .joinpath(f"assets/responses_{language}.json")
        .read_text("utf-8")
    )
    data = json.loads(text)
    return ResponseTemplateSet(language=data["language"], templates=dict(data["templates"]))


@dataclass(frozen=True)
class SuggestionOut:
    number: int
    key: str
    title: str


@dataclass(frozen=True)
class AgentResponse:
    text: str
    ssml: str
    suggestions: Tuple[SuggestionOut, ...] = ()
    directives: Tuple[str, ...] = ()


# -- SSML ---------------------------------------------------------------


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


SentenceRef = Tuple[int, int]  # (paragraph index, sentence index)


def build_ssml(
    segments: Sequence[Sequence[str]],
    prosody: Optional[Prosody] = None,
    emphases: Sequence[SentenceRef] = (),
    pauses: Sequence[Tuple[SentenceRef, int]] = (),
) -> str:
    """Wrap paragraphs of sentences in speak/p/s markup.

    ``emphases`` lists sentences to wrap in <emphasis>; ``pauses`` puts a
    <break> of the given milliseconds after a sentence.
    """
    prosody = prosody or Prosody()
    if not RATE_MIN <= prosody.rate <= RATE_MAX:
        raise InvalidRateError(f"rate must be in [{RATE_MIN}, {RATE_MAX}], got {prosody.rate}")
    emphasis_set = set(emphases)
    pause_map: Dict[SentenceRef, int] = {}
    for ref, duration in pauses:
        pause_map[ref] = duration

    paragraphs = []
    for p_index, sentences in enumerate(segments):
        parts = []
        for s_index, sentence in enumerate(sentences):
            body = _escape(sentence)
            if (p_index, s_index) in emphasis_set:
                body = f"<emphasis>{body}</emphasis>"
            parts.append(f"<s>{body}</s>")
            duration = pause_map.get((p_index, s_index))
            if duration:
                parts.append(f'<break time="{int(duration)}ms"/>')
        if parts:
            paragraphs.append("<p>" + "".join(parts) + "</p>")

    inner = "".join(paragraphs)
    if prosody.rate != 1.0:
        inner = f'<prosody rate="{round(prosody.rate * 100)}%">{inner}</prosody>'
    if prosody.voice:
        inner = f'<voice name="{_escape(prosody.voice)}">{inner}</voice>'
    return f"<speak>{inner}</speak>" if inner else "<speak/>"


def strip_markup(ssml: str) -> str:
    """Text content of an SSML document, whitespace-normalized."""
    root = ElementTree.fromstring(ssml)
    return " ".join(" ".join(root.itertext()).split())


_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.!?])\s+(?=[A-ZÄÖÜ\"'0-9])")


def split_sentences(text: str) -> List[str]:
    """Approximate splitter: boundary at ./!/? before whitespace + uppercase."""
    parts = [part.strip() for part in _SENTENCE_SPLIT_RE.split(text)]
    return [part for part in parts if part]


def _ensure_period(text: str) -> str:
    text = text.strip()
    return text if not text or text[-1] in ".!?" else text + "."


# -- renderer -----------------------------------------------------------


def render(
    actions: Sequence[DialogueAction],
    templates: ResponseTemplateSet,
    prosody: Optional[Prosody] = None,
) -> AgentResponse:
    """Compose one AgentResponse from a turn's actions."""
    segments: List[List[str]] = []
    emphases: List[SentenceRef] = []
    pauses: List[Tuple[SentenceRef, int]] = []
    suggestions: List[SuggestionOut] = []
    directives: List[str] = []

    def add_paragraph(sentences: List[str]) -> int:
        segments.append(sentences)
        return len(segments) - 1

    for action in actions:
        if isinstance(action, Say):
            text = templates.fill(action.text_key, dict(action.params))
            add_paragraph(split_sentences(text))
        elif isinstance(action, Help):
            add_paragraph(split_sentences(templates.fill("help", {})))
        elif isinstance(action, Goodbye):
            add_paragraph(split_sentences(templates.fill("goodbye", {})))
        elif isinstance(action, SuggestArticles):
            if action.related:
                intro_key = "related_intro"
            elif len(action.items) == 1:
                intro_key = "suggest_intro_one"
            else:
                intro_key = "suggest_intro"
            intro = templates.fill(intro_key, {"count": str(len(action.items))})
            sentences = split_sentences(intro)
            p_index = add_paragraph(sentences)
            for number, item in enumerate(action.items, start=1):
                sentences.append(f"{number}. {_ensure_period(item.title)}")
                pauses.append(((p_index, len(sentences) - 1), SUGGESTION_PAUSE_MS))
                suggestions.append(
                    SuggestionOut(number=number, key=item.key, title=item.title)
                )
        elif isinstance(action, ReadArticle):
            title = _ensure_period(action.title)
            p_index = add_paragraph([title])
            emphases.append((p_index, 0))
            for paragraph in action.text.split("\n\n"):
                sentences = split_sentences(paragraph)
                if sentences:
                    add_paragraph(sentences)
            if action.part == "opening":
                add_paragraph(split_sentences(templates.fill("read_full_hint", {})))
        elif isinstance(action, PlaybackDirective):
            directives.append(action.directive)
        else:
            raise ResponseError(f"cannot render action {action!r}")

    ssml = build_ssml(segments, prosody, emphases, pauses)
    text = " ".join(sentence for paragraph in segments for sentence in paragraph)
    return AgentResponse(
        text=text,
        ssml=ssml,
        suggestions=tuple(suggestions),
        directives=tuple(directives),
    )
