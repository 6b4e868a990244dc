import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsagent.graph import (
    CorruptSnapshotError,
    DanglingHandleError,
    EdgeType,
    GraphStore,
    InvalidKeyError,
    NodeHandle,
    NodeLabel,
    SchemaViolationError,
    SingleResortViolationError,
)

ENTITY_PROPS = {"name": "Donald Trump", "url": "https://www.wikidata.org/wiki/Q22686"}


def article_props(date="2024-03-01T09:00:00Z", title="Title"):
    return {"date": date, "title": title, "opening_paragraph": "Open.", "body": "Body."}


def test_merge_entity_twice_yields_one_node():
    store = GraphStore()
    store.merge_node(NodeLabel.ENTITY, "Q22686", ENTITY_PROPS)
    store.merge_node(NodeLabel.ENTITY, "Q22686", ENTITY_PROPS)
    assert store.stats()["nodes"]["Entity"] == 1


def test_merge_tag_creates_node():
    store = GraphStore()
    assert store.stats()["nodes"]["Tag"] == 0
    store.merge_node(NodeLabel.TAG, "economy")
    assert store.stats()["nodes"]["Tag"] == 1


def test_merge_overwrites_props_last_write_wins():
    store = GraphStore()
    handle = store.merge_node(NodeLabel.ENTITY, "Q22686", ENTITY_PROPS)
    store.merge_node(
        NodeLabel.ENTITY, "Q22686", {"name": "D. Trump", "url": ENTITY_PROPS["url"]}
    )
    assert store.stats()["nodes"]["Entity"] == 1
    assert store.node_props(handle)["name"] == "D. Trump"


def test_empty_key_rejected():
    store = GraphStore()
    with pytest.raises(InvalidKeyError):
        store.merge_node(NodeLabel.TAG, "   ")


def test_malformed_entity_key_rejected():
    store = GraphStore()
    with pytest.raises(InvalidKeyError):
        store.merge_node(NodeLabel.ENTITY, "X123", ENTITY_PROPS)


def test_bad_article_props_rejected():
    store = GraphStore()
    with pytest.raises(SchemaViolationError):
        store.merge_node(NodeLabel.ARTICLE, "a1", article_props(date="yesterday"))
    with pytest.raises(SchemaViolationError):
        store.merge_node(NodeLabel.ARTICLE, "a1", {"date": "2024-01-01", "title": " "})
    with pytest.raises(SchemaViolationError):
        store.merge_node(NodeLabel.TAG, "x", {"bogus": "y"})


def test_relative_entity_url_rejected():
    store = GraphStore()
    with pytest.raises(SchemaViolationError):
        store.merge_node(NodeLabel.ENTITY, "Q1", {"name": "X", "url": "/wiki/Q1"})


def test_case_folded_labels_share_node_keep_display_name():
    store = GraphStore()
    first = store.merge_node(NodeLabel.RESORT, "Sport")
    second = store.merge_node(NodeLabel.RESORT, "sport")
    assert first == second
    assert store.stats()["nodes"]["Resort"] == 1
    assert store.node_props(second)["display_name"] == "sport"


def test_merge_edge_idempotent():
    store = GraphStore()
    article = store.merge_node(NodeLabel.ARTICLE, "a1", article_props())
    entity = store.merge_node(NodeLabel.ENTITY, "Q22686", ENTITY_PROPS)
    store.merge_edge(article, EdgeType.MENTIONS, entity)
    store.merge_edge(article, EdgeType.MENTIONS, entity)
    assert store.stats()["edges"]["MENTIONS"] == 1


def test_second_resort_rejected():
    store = GraphStore()
    article = store.merge_node(NodeLabel.ARTICLE, "a1", article_props())
    sports = store.merge_node(NodeLabel.RESORT, "sports")
    economy = store.merge_node(NodeLabel.RESORT, "economy")
    store.merge_edge(article, EdgeType.PART_OF, sports)
    store.merge_edge(article, EdgeType.PART_OF, sports)  # same resort is fine
    with pytest.raises(SingleResortViolationError):
        store.merge_edge(article, EdgeType.PART_OF, economy)


def test_edge_label_schema_enforced():
    store = GraphStore()
    article = store.merge_node(NodeLabel.ARTICLE, "a1", article_props())
    entity = store.merge_node(NodeLabel.ENTITY, "Q22686", ENTITY_PROPS)
    with pytest.raises(SchemaViolationError):
        store.merge_edge(entity, EdgeType.INSTANCE_OF, article)


def test_dangling_handles_rejected():
    store = GraphStore()
    article = store.merge_node(NodeLabel.ARTICLE, "a1", article_props())
    ghost = NodeHandle(NodeLabel.ENTITY, "Q999")
    with pytest.raises(DanglingHandleError):
        store.merge_edge(article, EdgeType.MENTIONS, ghost)
    with pytest.raises(DanglingHandleError):
        store.neighbors(ghost, EdgeType.MENTIONS, "in")
    with pytest.raises(DanglingHandleError):
        store.node_props(ghost)


def test_neighbors_counts_and_empty():
    store = GraphStore()
    article = store.merge_node(NodeLabel.ARTICLE, "a1", article_props())
    for qid in ("Q3", "Q1", "Q2"):
        entity = store.merge_node(NodeLabel.ENTITY, qid, ENTITY_PROPS)
        store.merge_edge(article, EdgeType.MENTIONS, entity)
    found = store.neighbors(article, EdgeType.MENTIONS, "out")
    assert [h.key for h in found] == ["Q1", "Q2", "Q3"]  # sorted, deterministic
    lonely = store.merge_node(NodeLabel.ENTITY, "Q9", ENTITY_PROPS)
    assert store.neighbors(lonely, EdgeType.MENTIONS, "in") == []


def test_incoming_mentions_match_fixture_scan(store5):
    # independent oracle: scan the fixture's feed items for the entity name
    from tests.conftest import feed_items

    expected = {
        f"mini:{item['id']}"
        for item in feed_items("feed5.json")
        if "Donald Trump" in (item["title"] + item["first_sentence"] + item["text"])
    }
    trump = store5.node(NodeLabel.ENTITY, "Q22686")
    incoming = {h.key for h in store5.neighbors(trump, EdgeType.MENTIONS, "in")}
    assert incoming == expected
    assert len(incoming) == 2


def test_stats_empty_store():
    stats = GraphStore().stats()
    assert all(v == 0 for v in stats["nodes"].values())
    assert all(v == 0 for v in stats["edges"].values())


def test_stats_after_fixture_ingest(store5):
    assert store5.stats()["nodes"]["Article"] == 5


def test_entity_count_equals_distinct_ids(store5, gazetteer):
    # set-size oracle over the fixture mentions
    from newsagent.linking import annotate
    from tests.conftest import feed_items

    distinct = set()
    for item in feed_items("feed5.json"):
        text = "\n".join([item["title"], item["first_sentence"], item["text"]])
        distinct |= {m.entry.wiki_data_item_id for m in annotate(text, gazetteer)}
    assert store5.stats()["nodes"]["Entity"] == len(distinct)


# -- snapshots ------------------------------------------------------------


def _random_store(seed: int, size: int = 100) -> GraphStore:
    rng = random.Random(seed)
    store = GraphStore()
    articles, resorts, tags, entities = [], [], [], []
    for i in range(size // 4):
        articles.append(
            store.merge_node(
                NodeLabel.ARTICLE,
                f"a{i}",
                article_props(date=f"2024-01-{rng.randint(1, 28):02d}T10:00:00Z", title=f"T{i}"),
            )
        )
        resorts.append(store.merge_node(NodeLabel.RESORT, f"r{rng.randint(0, 5)}"))
        tags.append(store.merge_node(NodeLabel.TAG, f"t{rng.randint(0, 9)}"))
        entities.append(
            store.merge_node(NodeLabel.ENTITY, f"Q{rng.randint(1, 40)}", ENTITY_PROPS)
        )
    for article in articles:
        store.merge_edge(article, EdgeType.PART_OF, rng.choice(resorts))
        for tag in rng.sample(tags, k=min(len(tags), rng.randint(0, 3))):
            store.merge_edge(article, EdgeType.HAS_TAG, tag)
        for entity in rng.sample(entities, k=min(len(entities), rng.randint(0, 3))):
            store.merge_edge(article, EdgeType.MENTIONS, entity)
    return store


def test_snapshot_roundtrip_empty(tmp_path):
    path = tmp_path / "empty.json"
    store = GraphStore()
    store.snapshot_save(path)
    assert GraphStore.snapshot_load(path).stats() == store.stats()


def test_snapshot_roundtrip_is_byte_identical(tmp_path):
    store = _random_store(seed=7)
    first, second = tmp_path / "one.json", tmp_path / "two.json"
    store.snapshot_save(first)
    loaded = GraphStore.snapshot_load(first)
    loaded.snapshot_save(second)
    assert first.read_bytes() == second.read_bytes()
    assert loaded.stats() == store.stats()


def test_snapshot_roundtrip_preserves_neighbors(tmp_path):
    store = _random_store(seed=11)
    path = tmp_path / "g.json"
    store.snapshot_save(path)
    loaded = GraphStore.snapshot_load(path)
    for article in store.nodes(NodeLabel.ARTICLE):
        for edge_type in (EdgeType.PART_OF, EdgeType.HAS_TAG, EdgeType.MENTIONS):
            assert store.neighbors(article, edge_type, "out") == loaded.neighbors(
                article, edge_type, "out"
            )


def test_truncated_snapshot_rejected(tmp_path):
    store = _random_store(seed=3)
    path = tmp_path / "g.json"
    store.snapshot_save(path)
    blob = path.read_bytes()
    path.write_bytes(blob[: len(blob) // 2])
    with pytest.raises(CorruptSnapshotError):
        GraphStore.snapshot_load(path)


def test_tampered_snapshot_rejected(tmp_path):
    store = _random_store(seed=5)
    path = tmp_path / "g.json"
    store.snapshot_save(path)
    doc = json.loads(path.read_text("utf-8"))
    doc["nodes"][0]["key"] = "hacked"
    path.write_text(json.dumps(doc), "utf-8")
    with pytest.raises(CorruptSnapshotError):
        GraphStore.snapshot_load(path)


def test_wrong_version_rejected(tmp_path):
    path = tmp_path / "g.json"
    path.write_text('{"version": 99, "nodes": [], "edges": []}', "utf-8")
    with pytest.raises(CorruptSnapshotError):
        GraphStore.snapshot_load(path)


# -- properties -----------------------------------------------------------

_tag_keys = st.text(alphabet="abcdefgh", min_size=1, max_size=4)


@given(st.lists(_tag_keys, min_size=1, max_size=20))
def test_node_uniqueness_per_key(keys):
    store = GraphStore()
    for key in keys:
        store.merge_node(NodeLabel.TAG, key)
    assert store.stats()["nodes"]["Tag"] == len({k.casefold() for k in keys})


@given(st.lists(st.tuples(_tag_keys, _tag_keys), min_size=1, max_size=12), st.randoms())
def test_merge_order_insensitive_for_distinct_keys(pairs, rng):
    # distinct (article, tag) merge+link operations commute
    ops = list(dict.fromkeys(pairs))
    stores = []
    for ordering in (ops, rng.sample(ops, len(ops))):
        store = GraphStore()
        for article_key, tag_key in ordering:
            article = store.merge_node(NodeLabel.ARTICLE, article_key, article_props())
            tag = store.merge_node(NodeLabel.TAG, tag_key)
            store.merge_edge(article, EdgeType.HAS_TAG, tag)
        stores.append(store)
    assert stores[0].stats() == stores[1].stats()
    for article in stores[0].nodes(NodeLabel.ARTICLE):
        assert stores[0].neighbors(article, EdgeType.HAS_TAG, "out") == stores[1].neighbors(
            article, EdgeType.HAS_TAG, "out"
        )


@given(st.lists(st.sampled_from(["A", "B", "C"]), min_size=1, max_size=6))
def test_same_key_final_props_from_last_merge(names):
    store = GraphStore()
    for name in names:
        store.merge_node(NodeLabel.ENTITY, "Q1", {"name": name, "url": ENTITY_PROPS["url"]})
    handle = store.node(NodeLabel.ENTITY, "Q1")
    assert store.node_props(handle)["name"] == names[-1]
