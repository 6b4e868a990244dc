"""Commit article records to the graph with entity linking.

Each article commits atomically: the article node, its resort, tags,
and linked entities all land inside one write batch, so concurrent
readers never see an article without its PART_OF edge. A failing
record is rejected and the batch continues.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, List, Sequence, Tuple

from newsagent.graph import EdgeType, GraphError, GraphStore, NodeLabel
from newsagent.ingest.feed import ArticleRecord, FeedSource, fetch_feed, normalize
from newsagent.linking import Mention

logger = logging.getLogger(__name__)

# Any callable producing mentions works as a linker (gazetteer or remote).
Linker = Callable[[str], Sequence[Mention]]


@dataclass
class IngestReport:
    source_id: str
    fetched: int = 0
    created: int = 0
    merged: int = 0
    rejected: List[Tuple[int, str]] = field(default_factory=list)
    entities_linked: int = 0
    started: str = ""
    finished: str = ""

    def as_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "fetched": self.fetched,
            "created": self.created,
            "merged": self.merged,
            "rejected": [list(pair) for pair in self.rejected],
            "entities_linked": self.entities_linked,
            "started": self.started,
            "finished": self.finished,
        }


def _now() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


def _commit_record(record: ArticleRecord, linker: Linker, store: GraphStore) -> int:
    """Merge one article plus resort, tags, and entities; returns mention count."""
    with store.write_batch():
        # resort first: if its key is invalid we fail before the article lands
        resort = store.merge_node(NodeLabel.RESORT, record.resort_name)
        article = store.merge_node(
            NodeLabel.ARTICLE,
            record.external_id,
            {
                "date": record.date,
                "title": record.title,
                "opening_paragraph": record.opening_paragraph,
                "body": record.body,
                "source_id": record.source_id,
            },
        )
        store.merge_edge(article, EdgeType.PART_OF, resort)
        for tag_name in record.tag_names:
            tag = store.merge_node(NodeLabel.TAG, tag_name)
            store.merge_edge(article, EdgeType.HAS_TAG, tag)

        text = "\n".join(
            part for part in (record.title, record.opening_paragraph, record.body) if part
        )
        linked = set()
        for mention in linker(text):
            entry = mention.entry
            if entry.wiki_data_item_id in linked:
                continue
            linked.add(entry.wiki_data_item_id)
            entity = store.merge_node(
                NodeLabel.ENTITY,
                entry.wiki_data_item_id,
                {"name": entry.name, "url": entry.url},
            )
            store.merge_edge(article, EdgeType.MENTIONS, entity)
            entity_class = store.merge_node(NodeLabel.ENTITY_CLASS, entry.entity_class.lower())
            store.merge_edge(entity, EdgeType.INSTANCE_OF, entity_class)
        return len(linked)


def ingest(
    records: Sequence[ArticleRecord],
    linker: Linker,
    store: GraphStore,
    source_id: str = "",
    rejects: Sequence[Tuple[int, str]] = (),
) -> IngestReport:
    """Merge records into the graph; per-record failures never abort the batch."""
    report = IngestReport(
        source_id=source_id or (records[0].source_id if records else ""),
        fetched=len(records) + len(rejects),
        rejected=list(rejects),
        started=_now(),
    )
    for index, record in enumerate(records):
        existed = store.has_node(NodeLabel.ARTICLE, record.external_id)
        try:
            report.entities_linked += _commit_record(record, linker, store)
        except GraphError as exc:
            logger.warning("rejecting article %s: %s", record.external_id, exc)
            report.rejected.append((index, f"graph:{exc}"))
            continue
        if existed:
            report.merged += 1
        else:
            report.created += 1
    report.finished = _now()
    return report


def ingest_source(source: FeedSource, linker: Linker, store: GraphStore) -> IngestReport:
    """Fetch, normalize, and ingest one source end to end."""
    result = fetch_feed(source)
    records, rejects = normalize(result.data, source.id)
    return ingest(records, linker, store, source_id=source.id, rejects=rejects)
