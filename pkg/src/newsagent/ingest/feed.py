"""Feed sources, fetching, and normalization to article records.

Feed format (UTF-8 JSON):

    {"feed_version": 1,
     "items": [{"id": ..., "date": ..., "title": ..., "first_sentence": ...,
                "text": ..., "resort": ..., "tags": [...]}]}

Article ids are namespaced as ``<source_id>:<item_id>`` so the same feed
served by two sources cannot collide in the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional, Tuple

import httpx

from newsagent.graph import canonical_timestamp

FEED_VERSION = 1
DEFAULT_INTERVAL_S = 3600
DEFAULT_TIMEOUT_S = 10.0


class FeedError(Exception):
    """Base class for feed fetch/parse errors."""


class NetworkError(FeedError):
    """Transport failure or non-200 response; retry next tick."""


class FeedNotFoundError(FeedError):
    """Source location does not exist."""


class FeedTimeoutError(FeedError):
    """Fetch exceeded the configured deadline."""


class MalformedFeedError(FeedError):
    """Document-level parse failure (not valid feed JSON)."""


@dataclass(frozen=True)
class FeedSource:
    id: str
    kind: str  # "http" | "file"
    location: str
    interval_s: int = DEFAULT_INTERVAL_S

    def __post_init__(self):
        if not self.id or not self.location:
            raise ValueError("feed source needs a non-empty id and location")
        if self.kind not in ("http", "file"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.interval_s < 1:
            raise ValueError("poll interval must be >= 1 second")


@dataclass(frozen=True)
class FetchResult:
    data: bytes
    retrieved_at: datetime


@dataclass(frozen=True)
class ArticleRecord:
    external_id: str
    date: str
    title: str
    opening_paragraph: str
    body: str
    resort_name: str
    tag_names: Tuple[str, ...]
    source_id: str


def fetch_feed(source: FeedSource, timeout_s: float = DEFAULT_TIMEOUT_S) -> FetchResult:
    """Retrieve the raw feed document; never touches the graph."""
    now = datetime.now(timezone.utc)
    if source.kind == "file":
        try:
            with open(source.location, "rb") as fh:
                return FetchResult(fh.read(), now)
        except FileNotFoundError:
            raise FeedNotFoundError(f"no such feed file: {source.location}") from None
        except OSError as exc:
            raise NetworkError(f"cannot read {source.location}: {exc}") from exc
    try:
        response = httpx.get(source.location, timeout=timeout_s)
    except httpx.TimeoutException as exc:
        raise FeedTimeoutError(f"fetch of {source.location} timed out") from exc
    except httpx.HTTPError as exc:
        raise NetworkError(f"fetch of {source.location} failed: {exc}") from exc
    if response.status_code == 404:
        raise FeedNotFoundError(f"{source.location} returned 404")
    if response.status_code != 200:
        raise NetworkError(f"{source.location} returned status {response.status_code}")
    return FetchResult(response.content, now)


def _check_item(item: dict) -> Optional[str]:
    """Reason string when an item is unusable, else None."""
    if not isinstance(item, dict):
        return "bad:item"
    for name in ("id", "title", "resort", "date"):
        value = item.get(name)
        if not isinstance(value, str) or not value.strip():
            return f"missing:{name}"
    try:
        canonical_timestamp(item["date"])
    except ValueError:
        return "bad:date"
    tags = item.get("tags", [])
    if not isinstance(tags, list) or any(not isinstance(t, str) or not t.strip() for t in tags):
        return "bad:tags"
    return None


def normalize(raw: bytes, source_id: str) -> Tuple[List[ArticleRecord], List[Tuple[int, str]]]:
    """Map a raw feed document to article records plus per-item rejects."""
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedFeedError(f"feed is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("feed_version") != FEED_VERSION:
        raise MalformedFeedError(
            f"unsupported feed_version: {doc.get('feed_version')!r}"
            if isinstance(doc, dict)
            else "feed document must be a JSON object"
        )
    items = doc.get("items")
    if not isinstance(items, list):
        raise MalformedFeedError("feed has no items list")

    records: List[ArticleRecord] = []
    rejects: List[Tuple[int, str]] = []
    for index, item in enumerate(items):
        reason = _check_item(item)
        if reason is not None:
            rejects.append((index, reason))
            continue
        records.append(
            ArticleRecord(
                external_id=f"{source_id}:{item['id'].strip()}",
                date=item["date"],
                title=item["title"].strip(),
                opening_paragraph=str(item.get("first_sentence", "") or ""),
                body=str(item.get("text", "") or ""),
                resort_name=item["resort"].strip(),
                tag_names=tuple(t.strip() for t in item.get("tags", [])),
                source_id=source_id,
            )
        )
    return records, rejects
