"""Related-article recommendation over shared entities and tags.

An article is related to the seed if it shares at least one mentioned
entity or tag. Shared entities weigh more than shared tags because the
linker resolves them to specific things rather than broad topics; both
weights are configurable.
"""

from __future__ import annotations

from typing import List, Tuple

from newsagent.graph import EdgeType, GraphStore, NodeHandle, NodeLabel
from newsagent.query.executor import NodeSnapshot

DEFAULT_ENTITY_WEIGHT = 2
DEFAULT_TAG_WEIGHT = 1


class UnknownArticleError(Exception):
    """Seed article key not present in the store."""


def related_articles(
    article_key: str,
    k: int,
    store: GraphStore,
    entity_weight: int = DEFAULT_ENTITY_WEIGHT,
    tag_weight: int = DEFAULT_TAG_WEIGHT,
) -> List[Tuple[NodeSnapshot, int]]:
    """Top-k articles by shared-entity/shared-tag score, best first.

    Ordering: score descending, then newer date, then key ascending.
    Zero-score articles and the seed itself are excluded.
    """
    seed = store.node(NodeLabel.ARTICLE, article_key)
    if seed is None:
        raise UnknownArticleError(f"no article with key {article_key!r}")
    seed_entities = set(store.neighbors(seed, EdgeType.MENTIONS, "out"))
    seed_tags = set(store.neighbors(seed, EdgeType.HAS_TAG, "out"))

    scored = []
    for other in store.nodes(NodeLabel.ARTICLE):
        if other.key == article_key:
            continue
        shared_entities = sum(
            1 for e in store.neighbors(other, EdgeType.MENTIONS, "out") if e in seed_entities
        )
        shared_tags = sum(
            1 for t in store.neighbors(other, EdgeType.HAS_TAG, "out") if t in seed_tags
        )
        score = entity_weight * shared_entities + tag_weight * shared_tags
        if score > 0:
            scored.append((other, score))

    # multi-pass stable sort: key asc, then date desc, then score desc
    scored.sort(key=lambda pair: pair[0].key)
    scored.sort(key=lambda pair: store.node_props(pair[0]).get("date", ""), reverse=True)
    scored.sort(key=lambda pair: pair[1], reverse=True)

    out = []
    for handle, score in scored[:k]:
        snapshot = NodeSnapshot(
            label=handle.label.value,
            key=handle.key,
            properties=store.property_view(handle),
        )
        out.append((snapshot, score))
    return out
