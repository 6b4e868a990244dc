"""Rule-based intent recognition with slot extraction.

Recognition runs in three stages over the normalized utterance:

1. exact phrase-template match with slot capture (confidence 1.0);
   among several matching phrases the one with the most literal tokens
   wins, then config order;
2. token-overlap (Jaccard) scoring against all phrases, taking the best
   intent when the score reaches the threshold (no slots);
3. when the session context holds suggestions: ordinal words/digits or
   headline keywords select a suggestion.

Anything else is the fallback intent with confidence 0.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

OVERLAP_THRESHOLD = 0.6

INTENT_NAMES = (
    "greeting",
    "overview",
    "list_resorts",
    "resort_search",
    "entity_search",
    "select_suggestion",
    "more_suggestions",
    "read_full",
    "control_next",
    "control_again",
    "control_pause",
    "control_play",
    "help",
    "goodbye",
    "fallback",
)

FALLBACK = "fallback"

_SLOT_RE = re.compile(r"\{([a-z_]+)\}")
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)

_UMLAUTS = {"ä": "ae", "ö": "oe", "ü": "ue", "ß": "ss"}

_ORDINAL_WORDS = {
    "en": {
        "first": 1, "second": 2, "third": 3, "fourth": 4, "fifth": 5,
        "sixth": 6, "seventh": 7, "eighth": 8, "ninth": 9,
    },
    "de": {
        "erste": 1, "zweite": 2, "dritte": 3, "vierte": 4, "fuenfte": 5,
        "sechste": 6, "siebte": 7, "achte": 8, "neunte": 9,
    },
}
_DE_ORDINAL_SUFFIXES = ("", "r", "n", "s", "m")

# leading/trailing filler stripped from captured slot values
_SLOT_EDGE_WORDS = {"the", "a", "an", "der", "die", "das", "den", "dem", "des"}


class ConfigError(Exception):
    """Intent configuration missing or inconsistent."""


@dataclass(frozen=True)
class SlotDef:
    name: str
    kind: str  # resort | entity_text | ordinal | keyword


@dataclass(frozen=True)
class IntentDef:
    name: str
    phrases: Tuple[str, ...] = ()
    slots: Tuple[SlotDef, ...] = ()


@dataclass(frozen=True)
class IntentConfig:
    language: str
    stopwords: frozenset
    intents: Tuple[IntentDef, ...]


@dataclass(frozen=True)
class IntentResult:
    intent: str
    slots: Dict[str, str] = field(default_factory=dict)
    confidence: float = 0.0


def normalize_utterance(text: str, lang: str = "en") -> str:
    """Lowercase, strip punctuation, collapse whitespace, fold umlauts."""
    lowered = text.lower()
    if lang == "de":
        for src, dst in _UMLAUTS.items():
            lowered = lowered.replace(src, dst)
    cleaned = _PUNCT_RE.sub(" ", lowered)
    return " ".join(cleaned.split())


def parse_ordinal(text: str, lang: str = "en") -> Optional[int]:
    """First ordinal word or digit 1-9 in the text, else None."""
    words = _ORDINAL_WORDS.get(lang, _ORDINAL_WORDS["en"])
    for token in normalize_utterance(text, lang).split():
        if token.isascii() and token.isdigit() and 1 <= int(token) <= 9:
            return int(token)
        if token in words:
            return words[token]
        if lang == "de":
            for base, value in words.items():
                if token in (base + suffix for suffix in _DE_ORDINAL_SUFFIXES):
                    return value
    return None


def render_ordinal(index: int, lang: str = "en") -> str:
    """Ordinal word for 1-9 (inverse of parse_ordinal)."""
    words = _ORDINAL_WORDS.get(lang, _ORDINAL_WORDS["en"])
    for word, value in words.items():
        if value == index:
            return word
    raise ValueError(f"no ordinal word for {index}")


def _content_tokens(text: str, stopwords: frozenset, lang: str) -> set:
    return {t for t in normalize_utterance(text, lang).split() if t not in stopwords}


def match_headline_keyword(
    text: str,
    suggestions: Sequence[str],
    stopwords: frozenset = frozenset(),
    lang: str = "en",
) -> Optional[int]:
    """1-based index of the title sharing the most content words, if unique."""
    if not suggestions:
        return None
    tokens = _content_tokens(text, stopwords, lang)
    if not tokens:
        return None
    overlaps = [
        len(tokens & _content_tokens(title, stopwords, lang)) for title in suggestions
    ]
    best = max(overlaps)
    if best < 1 or overlaps.count(best) != 1:
        return None
    return overlaps.index(best) + 1


def load_intent_config(path) -> IntentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return intent_config_from_mapping(data)


def intent_config_from_mapping(data: dict) -> IntentConfig:
    language = data.get("language", "en")
    stopwords = frozenset(data.get("stopwords", []))
    intents = []
    seen = set()
    for raw in data.get("intents", []):
        name = raw["name"]
        if name in seen:
            raise ConfigError(f"duplicate intent {name!r}")
        seen.add(name)
        slots = tuple(SlotDef(s["name"], s["kind"]) for s in raw.get("slots", []))
        phrases = tuple(raw.get("phrases", []))
        declared = {s.name for s in slots}
        for phrase in phrases:
            for placeholder in _SLOT_RE.findall(phrase):
                if placeholder not in declared:
                    raise ConfigError(
                        f"intent {name!r}: placeholder {{{placeholder}}} not declared as a slot"
                    )
        if name == FALLBACK and phrases:
            raise ConfigError("fallback intent must have no phrases")
        intents.append(IntentDef(name=name, phrases=phrases, slots=slots))
    if FALLBACK not in seen:
        intents.append(IntentDef(name=FALLBACK))
    return IntentConfig(language=language, stopwords=stopwords, intents=tuple(intents))


@dataclass(frozen=True)
class _CompiledPhrase:
    intent: str
    regex: re.Pattern
    slot_kinds: Dict[str, str]
    literal_tokens: frozenset
    literal_token_count: int
    order: int


def _strip_slot_edges(value: str) -> str:
    tokens = value.split()
    while tokens and tokens[0] in _SLOT_EDGE_WORDS:
        tokens.pop(0)
    while tokens and tokens[-1] in _SLOT_EDGE_WORDS:
        tokens.pop()
    return " ".join(tokens)


class IntentRecognizer:
    """Compiled matcher for one language's intent configuration."""

    def __init__(self, config: IntentConfig):
        if config is None:
            raise ConfigError("intent config not loaded")
        self.config = config
        self.lang = config.language
        self._phrases: List[_CompiledPhrase] = []
        order = 0
        for intent in config.intents:
            slot_kinds = {s.name: s.kind for s in intent.slots}
            for phrase in intent.phrases:
                # split before normalizing so slot markers survive it
                chunks = _SLOT_RE.split(phrase)  # odd indexes are slot names
                pattern_parts = []
                literal_words: List[str] = []
                for i, chunk in enumerate(chunks):
                    if i % 2 == 1:
                        pattern_parts.append(f"(?P<{chunk}>.+?)")
                        continue
                    literal = normalize_utterance(chunk, self.lang)
                    if literal:
                        literal_words.extend(literal.split())
                        pattern_parts.append(
                            r"\s*" + re.escape(literal).replace(r"\ ", r"\s+") + r"\s*"
                        )
                    else:
                        pattern_parts.append(r"\s*")
                regex = re.compile("^" + "".join(pattern_parts) + "$")
                self._phrases.append(
                    _CompiledPhrase(
                        intent.name,
                        regex,
                        slot_kinds,
                        frozenset(literal_words),
                        len(literal_words),
                        order,
                    )
                )
                order += 1

    def _template_match(self, normalized: str) -> Optional[IntentResult]:
        best: Optional[Tuple[int, int, IntentResult]] = None
        for phrase in self._phrases:
            match = phrase.regex.match(normalized)
            if match is None:
                continue
            slots = {}
            valid = True
            for name, raw_value in match.groupdict().items():
                value = _strip_slot_edges(raw_value.strip())
                kind = phrase.slot_kinds.get(name, "")
                if kind == "ordinal":
                    ordinal = parse_ordinal(value, self.lang)
                    if ordinal is None:
                        valid = False
                        break
                    value = str(ordinal)
                if not value:
                    valid = False
                    break
                slots[name] = value
            if not valid:
                continue
            candidate = (
                phrase.literal_token_count,
                -phrase.order,
                IntentResult(phrase.intent, slots, 1.0),
            )
            if best is None or candidate[:2] > best[:2]:
                best = candidate
        return best[2] if best else None

    def _overlap_match(self, normalized: str) -> Optional[IntentResult]:
        tokens = set(normalized.split())
        if not tokens:
            return None
        best_intent, best_score = None, 0.0
        for phrase in self._phrases:
            if not phrase.literal_tokens:
                continue
            score = len(tokens & phrase.literal_tokens) / len(tokens | phrase.literal_tokens)
            if score > best_score:
                best_intent, best_score = phrase.intent, score
        if best_intent is not None and best_score >= OVERLAP_THRESHOLD:
            return IntentResult(best_intent, {}, round(best_score, 4))
        return None

    def recognize(self, text: str, context: Optional[Sequence[str]] = None) -> IntentResult:
        """Map an utterance to exactly one IntentResult (total function)."""
        normalized = normalize_utterance(text, self.lang)

        result = self._template_match(normalized)
        if result is not None:
            return result

        result = self._overlap_match(normalized)
        if result is not None:
            return result

        if context:
            ordinal = parse_ordinal(normalized, self.lang)
            if ordinal is not None:
                return IntentResult("select_suggestion", {"ordinal": str(ordinal)}, 0.9)
            keyword_hits = self._keyword_hits(normalized, context)
            if len(keyword_hits) == 1:
                return IntentResult(
                    "select_suggestion", {"ordinal": str(keyword_hits[0])}, 0.75
                )
            if len(keyword_hits) > 1:
                return IntentResult("select_suggestion", {"ambiguous": "true"}, 0.5)

        return IntentResult(FALLBACK, {}, 0.0)

    def _keyword_hits(self, normalized: str, titles: Sequence[str]) -> List[int]:
        """1-based indexes of titles tied at the best non-zero keyword overlap."""
        tokens = _content_tokens(normalized, self.config.stopwords, self.lang)
        if not tokens:
            return []
        overlaps = [
            len(tokens & _content_tokens(title, self.config.stopwords, self.lang))
            for title in titles
        ]
        best = max(overlaps) if overlaps else 0
        if best < 1:
            return []
        return [i + 1 for i, count in enumerate(overlaps) if count == best]
