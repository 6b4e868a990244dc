"""Embedded property graph for the news knowledge base.

Five node labels (Article, Resort, Tag, Entity, EntityClass) and four
directed edge types connect articles to their sections, topic tags,
linked entities, and entity classes. Nodes are keyed (one node per
label+key) and merges are idempotent, so re-ingesting a feed never
duplicates content. The store lives in memory; persistence is an
explicit JSON snapshot.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple
from urllib.parse import urlparse

SNAPSHOT_VERSION = 1


class GraphError(Exception):
    """Base class for graph store errors."""


class InvalidKeyError(GraphError):
    """Node key is empty or malformed for its label."""


class SchemaViolationError(GraphError):
    """Properties or edge endpoints do not fit the label schema."""


class SingleResortViolationError(SchemaViolationError):
    """An article may belong to exactly one resort."""


class DanglingHandleError(GraphError):
    """Handle does not refer to a node in this store."""


class CorruptSnapshotError(GraphError):
    """Snapshot file failed version or checksum validation."""


class NodeLabel(str, Enum):
    ARTICLE = "Article"
    RESORT = "Resort"
    TAG = "Tag"
    ENTITY = "Entity"
    ENTITY_CLASS = "EntityClass"


class EdgeType(str, Enum):
    HAS_TAG = "HAS_TAG"
    PART_OF = "PART_OF"
    MENTIONS = "MENTIONS"
    INSTANCE_OF = "INSTANCE_OF"


# (source label, destination label) allowed per edge type
EDGE_SCHEMA: Dict[EdgeType, Tuple[NodeLabel, NodeLabel]] = {
    EdgeType.HAS_TAG: (NodeLabel.ARTICLE, NodeLabel.TAG),
    EdgeType.PART_OF: (NodeLabel.ARTICLE, NodeLabel.RESORT),
    EdgeType.MENTIONS: (NodeLabel.ARTICLE, NodeLabel.ENTITY),
    EdgeType.INSTANCE_OF: (NodeLabel.ENTITY, NodeLabel.ENTITY_CLASS),
}

# Property name under which a node's key is exposed to queries.
KEY_FIELD: Dict[NodeLabel, str] = {
    NodeLabel.ARTICLE: "id",
    NodeLabel.RESORT: "name",
    NodeLabel.TAG: "name",
    NodeLabel.ENTITY: "id",
    NodeLabel.ENTITY_CLASS: "name",
}

# Labels whose keys are case-folded; original casing kept in display_name.
_FOLDED_LABELS = {NodeLabel.RESORT, NodeLabel.TAG, NodeLabel.ENTITY_CLASS}

_ALLOWED_PROPS: Dict[NodeLabel, set] = {
    NodeLabel.ARTICLE: {"date", "title", "opening_paragraph", "body", "source_id"},
    NodeLabel.RESORT: {"display_name"},
    NodeLabel.TAG: {"display_name"},
    NodeLabel.ENTITY: {"name", "url"},
    NodeLabel.ENTITY_CLASS: {"display_name"},
}

_ENTITY_KEY_RE = re.compile(r"Q[0-9]+")


@dataclass(frozen=True)
class NodeHandle:
    label: NodeLabel
    key: str


@dataclass(frozen=True)
class EdgeHandle:
    edge_type: EdgeType
    src_key: str
    dst_key: str


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO 8601 timestamp; naive values are taken as UTC."""
    if not isinstance(value, str) or not value.strip():
        raise ValueError("empty timestamp")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def canonical_timestamp(value: str) -> str:
    """Normalize to UTC second precision so string order equals time order."""
    return parse_timestamp(value).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")


class _RWLock:
    """Readers-writer lock; the writer side is reentrant for its owner thread."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer: Optional[int] = None
        self._writer_depth = 0

    def acquire_read(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:  # writer may read its own batch
                self._writer_depth += 1
                return
            while self._writer is not None:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:
                self._writer_depth -= 1
                return
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:
                self._writer_depth += 1
                return
            while self._writer is not None or self._readers > 0:
                self._cond.wait()
            self._writer = me
            self._writer_depth = 1

    def release_write(self):
        with self._cond:
            self._writer_depth -= 1
            if self._writer_depth == 0:
                self._writer = None
                self._cond.notify_all()

    @contextmanager
    def reading(self):
        self.acquire_read()
        try:
            yield
        finally:
            self.release_read()

    @contextmanager
    def writing(self):
        self.acquire_write()
        try:
            yield
        finally:
            self.release_write()


class GraphStore:
    """In-memory property graph with merge semantics.

    Concurrency contract: any number of concurrent readers or one
    exclusive writer. Use ``write_batch()`` to commit an article and all
    of its edges atomically with respect to readers.
    """

    def __init__(self):
        self._lock = _RWLock()
        self._nodes: Dict[NodeLabel, Dict[str, Dict[str, str]]] = {
            label: {} for label in NodeLabel
        }
        self._out: Dict[EdgeType, Dict[str, set]] = {t: {} for t in EdgeType}
        self._in: Dict[EdgeType, Dict[str, set]] = {t: {} for t in EdgeType}

    # -- write side ---------------------------------------------------------

    @contextmanager
    def write_batch(self):
        """Hold the writer lock across several merges (atomic for readers)."""
        with self._lock.writing():
            yield self

    def merge_node(self, label: NodeLabel, key: str, props: Optional[Dict[str, Any]] = None) -> NodeHandle:
        """Create or update the node (label, key); last write wins on props."""
        label = NodeLabel(label)
        props = dict(props or {})
        if not isinstance(key, str) or not key.strip():
            raise InvalidKeyError(f"empty key for {label.value}")
        key = key.strip()
        if label is NodeLabel.ENTITY and not _ENTITY_KEY_RE.fullmatch(key):
            raise InvalidKeyError(f"entity key must match Q[0-9]+, got {key!r}")
        if label in _FOLDED_LABELS:
            props.setdefault("display_name", key)
            key = key.casefold()
        self._validate_props(label, props)
        with self._lock.writing():
            self._nodes[label][key] = props
        return NodeHandle(label, key)

    def merge_edge(self, src: NodeHandle, edge_type: EdgeType, dst: NodeHandle) -> EdgeHandle:
        """Idempotently link two existing nodes according to the edge schema."""
        edge_type = EdgeType(edge_type)
        src_label, dst_label = EDGE_SCHEMA[edge_type]
        with self._lock.writing():
            for handle in (src, dst):
                if handle.key not in self._nodes.get(handle.label, {}):
                    raise DanglingHandleError(f"no node {handle.label.value}:{handle.key}")
            if (src.label, dst.label) != (src_label, dst_label):
                raise SchemaViolationError(
                    f"{edge_type.value} requires {src_label.value}->{dst_label.value}, "
                    f"got {src.label.value}->{dst.label.value}"
                )
            if edge_type is EdgeType.PART_OF:
                existing = self._out[edge_type].get(src.key, set())
                if existing and dst.key not in existing:
                    raise SingleResortViolationError(
                        f"article {src.key!r} already belongs to resort "
                        f"{next(iter(existing))!r}"
                    )
            self._out[edge_type].setdefault(src.key, set()).add(dst.key)
            self._in[edge_type].setdefault(dst.key, set()).add(src.key)
        return EdgeHandle(edge_type, src.key, dst.key)

    def _validate_props(self, label: NodeLabel, props: Dict[str, Any]):
        allowed = _ALLOWED_PROPS[label]
        unknown = set(props) - allowed
        if unknown:
            raise SchemaViolationError(f"unknown props for {label.value}: {sorted(unknown)}")
        for name, value in props.items():
            if not isinstance(value, str):
                raise SchemaViolationError(f"prop {name!r} must be a string")
        if label is NodeLabel.ARTICLE:
            if not props.get("title", "").strip():
                raise SchemaViolationError("article title must be non-empty")
            try:
                props["date"] = canonical_timestamp(props.get("date", ""))
            except ValueError as exc:
                raise SchemaViolationError(f"article date not parseable: {exc}") from exc
            props.setdefault("opening_paragraph", "")
            props.setdefault("body", "")
        elif label is NodeLabel.ENTITY:
            if not props.get("name", "").strip():
                raise SchemaViolationError("entity name must be non-empty")
            parsed = urlparse(props.get("url", ""))
            if not (parsed.scheme and parsed.netloc):
                raise SchemaViolationError(f"entity url must be absolute: {props.get('url')!r}")

    # -- read side ----------------------------------------------------------

    def has_node(self, label: NodeLabel, key: str) -> bool:
        with self._lock.reading():
            return key in self._nodes[NodeLabel(label)]

    def node(self, label: NodeLabel, key: str) -> Optional[NodeHandle]:
        return NodeHandle(NodeLabel(label), key) if self.has_node(label, key) else None

    def node_props(self, handle: NodeHandle) -> Dict[str, str]:
        with self._lock.reading():
            try:
                return dict(self._nodes[handle.label][handle.key])
            except KeyError:
                raise DanglingHandleError(f"no node {handle.label.value}:{handle.key}") from None

    def property_view(self, handle: NodeHandle) -> Dict[str, str]:
        """Node properties plus the key exposed under its query field name."""
        props = self.node_props(handle)
        props[KEY_FIELD[handle.label]] = handle.key
        return props

    def keys(self, label: NodeLabel) -> List[str]:
        with self._lock.reading():
            return sorted(self._nodes[NodeLabel(label)])

    def nodes(self, label: NodeLabel) -> Iterator[NodeHandle]:
        label = NodeLabel(label)
        return (NodeHandle(label, key) for key in self.keys(label))

    def neighbors(self, node: NodeHandle, edge_type: EdgeType, direction: str) -> List[NodeHandle]:
        """Adjacent nodes over one edge type, sorted by key ascending."""
        edge_type = EdgeType(edge_type)
        if direction not in ("out", "in"):
            raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")
        src_label, dst_label = EDGE_SCHEMA[edge_type]
        with self._lock.reading():
            if node.key not in self._nodes.get(node.label, {}):
                raise DanglingHandleError(f"no node {node.label.value}:{node.key}")
            if direction == "out":
                keys, other = self._out[edge_type].get(node.key, set()), dst_label
                if node.label is not src_label:
                    return []
            else:
                keys, other = self._in[edge_type].get(node.key, set()), src_label
                if node.label is not dst_label:
                    return []
            return [NodeHandle(other, key) for key in sorted(keys)]

    def has_edge(self, edge_type: EdgeType, src_key: str, dst_key: str) -> bool:
        with self._lock.reading():
            return dst_key in self._out[EdgeType(edge_type)].get(src_key, set())

    def stats(self) -> Dict[str, Dict[str, int]]:
        with self._lock.reading():
            return {
                "nodes": {label.value: len(self._nodes[label]) for label in NodeLabel},
                "edges": {
                    t.value: sum(len(d) for d in self._out[t].values()) for t in EdgeType
                },
            }

    # -- snapshots ----------------------------------------------------------

    def _snapshot_body(self) -> Dict[str, Any]:
        nodes = [
            {"label": label.value, "key": key, "props": dict(sorted(props.items()))}
            for label in NodeLabel
            for key, props in sorted(self._nodes[label].items())
        ]
        edges = [
            {"type": t.value, "src": src, "dst": dst}
            for t in EdgeType
            for src in sorted(self._out[t])
            for dst in sorted(self._out[t][src])
        ]
        return {"version": SNAPSHOT_VERSION, "nodes": nodes, "edges": edges}

    @staticmethod
    def _checksum(body: Dict[str, Any]) -> str:
        blob = json.dumps(body, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def snapshot_save(self, path) -> None:
        """Write a deterministic, checksummed JSON snapshot."""
        with self._lock.reading():
            body = self._snapshot_body()
        doc = dict(body)
        doc["checksum"] = self._checksum(body)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
            fh.write("\n")

    @classmethod
    def snapshot_load(cls, path) -> "GraphStore":
        """Rebuild a store from a snapshot file produced by snapshot_save."""
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise CorruptSnapshotError(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("version") != SNAPSHOT_VERSION:
            raise CorruptSnapshotError(f"unsupported snapshot version: {doc.get('version')!r}")
        claimed = doc.get("checksum")
        body = {k: doc.get(k) for k in ("version", "nodes", "edges")}
        if claimed != cls._checksum(body):
            raise CorruptSnapshotError("checksum mismatch")
        store = cls()
        with store._lock.writing():
            for entry in doc["nodes"]:
                label = NodeLabel(entry["label"])
                store._nodes[label][entry["key"]] = dict(entry["props"])
            for entry in doc["edges"]:
                t = EdgeType(entry["type"])
                store._out[t].setdefault(entry["src"], set()).add(entry["dst"])
                store._in[t].setdefault(entry["dst"], set()).add(entry["src"])
        return store
