"""Named entity recognition and linking against a gazetteer.

Matching is case-insensitive, longest-match, left-to-right on word
boundaries; overlapping candidates lose to the earlier/longer one. The
confidence of a mention is the length of the matched alias relative to
the entry's canonical name (a short alias is weaker evidence), capped
at 1.0.

A remote linker speaking the POST /annotate wire contract can stand in
for the gazetteer; transport failures fall back to local annotation.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import httpx

logger = logging.getLogger(__name__)

DEFAULT_MIN_CONFIDENCE = 0.5

_ID_RE = re.compile(r"Q[0-9]+")
_WORD_RE = re.compile(r"\w", re.UNICODE)


class LinkingError(Exception):
    """Base class for gazetteer and remote linker errors."""


class MalformedGazetteerError(LinkingError):
    """Gazetteer file is not valid or an entry violates the schema."""


class DuplicateIdError(LinkingError):
    """Two gazetteer entries share a wiki_data_item_id."""


class RemoteLinkerError(LinkingError):
    """Base class for remote annotation failures."""


class NetworkError(RemoteLinkerError):
    """Transport failure or server error from the remote linker."""


class ProtocolError(RemoteLinkerError):
    """Remote linker answered with a body outside the wire contract."""


@dataclass(frozen=True)
class GazetteerEntry:
    wiki_data_item_id: str
    name: str
    aliases: Tuple[str, ...]
    url: str
    entity_class: str


@dataclass(frozen=True)
class Mention:
    surface: str
    start: int
    end: int  # exclusive
    entry: GazetteerEntry
    confidence: float


@dataclass(frozen=True)
class EntityRecord:
    wiki_data_item_id: str
    name: str
    url: str
    entity_class: str


def _fold(text: str) -> str:
    """Length-preserving lowercase (multi-char expansions are left as is)."""
    return "".join(c.lower() if len(c.lower()) == 1 else c for c in text)


class Gazetteer:
    """Immutable alias index over gazetteer entries."""

    def __init__(self, entries: Sequence[GazetteerEntry]):
        self.entries: Tuple[GazetteerEntry, ...] = tuple(entries)
        self.by_id: Dict[str, GazetteerEntry] = {}
        # folded alias -> entry; collisions go to the lowest Q-number
        self._alias_index: Dict[str, GazetteerEntry] = {}
        self.ambiguous_aliases: Dict[str, List[str]] = {}
        # folded first word of an alias -> [(folded alias, entry)]
        self._by_first_word: Dict[str, List[Tuple[str, GazetteerEntry]]] = {}

        for entry in self.entries:
            if entry.wiki_data_item_id in self.by_id:
                raise DuplicateIdError(f"duplicate id {entry.wiki_data_item_id}")
            self.by_id[entry.wiki_data_item_id] = entry

        for entry in self.entries:
            for alias in (entry.name, *entry.aliases):
                folded = _fold(alias)
                holder = self._alias_index.get(folded)
                if holder is not None and holder is not entry:
                    ids = self.ambiguous_aliases.setdefault(
                        folded, [holder.wiki_data_item_id]
                    )
                    if entry.wiki_data_item_id not in ids:
                        ids.append(entry.wiki_data_item_id)
                    winner = min((holder, entry), key=lambda e: int(e.wiki_data_item_id[1:]))
                    if winner is not holder:
                        self._alias_index[folded] = winner
                    logger.warning(
                        "alias %r is ambiguous (%s); keeping %s",
                        alias,
                        ", ".join(sorted(ids)),
                        self._alias_index[folded].wiki_data_item_id,
                    )
                elif holder is None:
                    self._alias_index[folded] = entry

        for folded, entry in self._alias_index.items():
            first = folded.split()[0] if folded.split() else folded
            self._by_first_word.setdefault(first, []).append((folded, entry))
        for candidates in self._by_first_word.values():
            candidates.sort(key=lambda pair: -len(pair[0]))  # longest alias first

    def __len__(self) -> int:
        return len(self.entries)

    def lookup_alias(self, text: str) -> Optional[GazetteerEntry]:
        return self._alias_index.get(_fold(text.strip()))

    def aliases(self) -> List[str]:
        return sorted(self._alias_index)


def _validate_entry(raw: dict, index: int) -> GazetteerEntry:
    if not isinstance(raw, dict):
        raise MalformedGazetteerError(f"entry {index} is not an object")
    entry_id = raw.get("id", "")
    if not isinstance(entry_id, str) or not _ID_RE.fullmatch(entry_id):
        raise MalformedGazetteerError(f"entry {index}: bad id {entry_id!r}")
    name = raw.get("name", "")
    aliases = raw.get("aliases", [])
    entity_class = raw.get("class", "")
    url = raw.get("url", "")
    if not isinstance(name, str) or not name.strip():
        raise MalformedGazetteerError(f"entry {index}: empty name")
    if not isinstance(aliases, list) or any(
        not isinstance(a, str) or not a.strip() for a in aliases
    ):
        raise MalformedGazetteerError(f"entry {index}: aliases must be non-empty strings")
    if not isinstance(entity_class, str) or not entity_class.strip():
        raise MalformedGazetteerError(f"entry {index}: empty class")
    return GazetteerEntry(
        wiki_data_item_id=entry_id,
        name=name.strip(),
        aliases=tuple(a.strip() for a in aliases),
        url=str(url),
        entity_class=entity_class.strip(),
    )


def load_gazetteer(path) -> Gazetteer:
    """Load a JSON array of `{id, name, aliases, url, class}` entries."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedGazetteerError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedGazetteerError("gazetteer must be a JSON array")
    return Gazetteer([_validate_entry(raw, i) for i, raw in enumerate(data)])


def _is_word_boundary(text: str, index: int) -> bool:
    """True when position `index` does not split a word."""
    if index <= 0 or index >= len(text):
        return True
    return not (_WORD_RE.match(text[index - 1]) and _WORD_RE.match(text[index]))


def annotate(
    text: str,
    gazetteer: Gazetteer,
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> List[Mention]:
    """Longest-match, non-overlapping mentions, sorted by start offset."""
    if not text:
        return []
    folded = _fold(text)
    mentions: List[Mention] = []
    position = 0
    while position < len(folded):
        if not (_WORD_RE.match(folded[position]) and _is_word_boundary(folded, position)):
            position += 1
            continue
        first_word_match = re.match(r"\w+", folded[position:])
        first = first_word_match.group() if first_word_match else ""
        best: Optional[Tuple[str, GazetteerEntry]] = None
        for alias, entry in gazetteer._by_first_word.get(first, ()):
            end = position + len(alias)
            if folded.startswith(alias, position) and _is_word_boundary(folded, end):
                best = (alias, entry)
                break  # candidates are longest-first
        if best is None:
            position += len(first) or 1
            continue
        alias, entry = best
        end = position + len(alias)
        confidence = min(1.0, len(alias) / len(entry.name))
        if confidence >= min_confidence:
            mentions.append(
                Mention(
                    surface=text[position:end],
                    start=position,
                    end=end,
                    entry=entry,
                    confidence=confidence,
                )
            )
        # the span is consumed even when the mention is dropped by threshold
        position = end
    return mentions


def entity_record(mention: Mention) -> EntityRecord:
    """Project a mention onto the record stored in the graph."""
    entry = mention.entry
    return EntityRecord(
        wiki_data_item_id=entry.wiki_data_item_id,
        name=entry.name,
        url=entry.url,
        entity_class=entry.entity_class.lower(),
    )


class RemoteLinker:
    """Client for the POST /annotate wire contract."""

    def __init__(self, url: str, timeout_s: float = 5.0):
        self.url = url.rstrip("/")
        self.timeout_s = timeout_s

    def annotate_remote(self, text: str) -> List[Mention]:
        try:
            response = httpx.post(
                f"{self.url}/annotate", json={"text": text}, timeout=self.timeout_s
            )
        except httpx.HTTPError as exc:
            raise NetworkError(f"remote linker unreachable: {exc}") from exc
        if response.status_code != 200:
            raise NetworkError(f"remote linker returned status {response.status_code}")
        try:
            payload = response.json()
            raw_mentions = payload["mentions"]
            mentions = []
            for raw in raw_mentions:
                entry = GazetteerEntry(
                    wiki_data_item_id=raw["id"],
                    name=raw["name"],
                    aliases=(),
                    url=raw.get("url", ""),
                    entity_class=raw.get("class", "thing"),
                )
                mentions.append(
                    Mention(
                        surface=raw["surface"],
                        start=int(raw["start"]),
                        end=int(raw["end"]),
                        entry=entry,
                        confidence=float(raw.get("confidence", 1.0)),
                    )
                )
            return mentions
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"malformed remote linker response: {exc}") from exc


class FallbackLinker:
    """Try the remote linker, fall back to local gazetteer annotation."""

    def __init__(
        self,
        remote: RemoteLinker,
        gazetteer: Gazetteer,
        min_confidence: float = DEFAULT_MIN_CONFIDENCE,
    ):
        self.remote = remote
        self.gazetteer = gazetteer
        self.min_confidence = min_confidence

    def __call__(self, text: str) -> List[Mention]:
        try:
            return self.remote.annotate_remote(text)
        except RemoteLinkerError as exc:
            logger.warning("remote linker failed (%s); using gazetteer", exc)
            return annotate(text, self.gazetteer, self.min_confidence)


class GazetteerLinker:
    """Plain local linker with a pinned threshold, usable as a pipeline linker."""

    def __init__(self, gazetteer: Gazetteer, min_confidence: float = DEFAULT_MIN_CONFIDENCE):
        self.gazetteer = gazetteer
        self.min_confidence = min_confidence

    def __call__(self, text: str) -> List[Mention]:
        return annotate(text, self.gazetteer, self.min_confidence)
