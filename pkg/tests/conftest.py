import json
from pathlib import Path

import pytest

from newsagent.graph import GraphStore
from newsagent.ingest import ingest, normalize
from newsagent.linking import GazetteerLinker, load_gazetteer

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer(FIXTURES / "gazetteer.json")


@pytest.fixture(scope="session")
def linker(gazetteer):
    return GazetteerLinker(gazetteer)


def build_store(feed_name: str, source_id: str, linker) -> GraphStore:
    store = GraphStore()
    raw = (FIXTURES / feed_name).read_bytes()
    records, rejects = normalize(raw, source_id)
    assert not rejects, f"fixture {feed_name} has rejects: {rejects}"
    ingest(records, linker, store, source_id=source_id)
    return store


@pytest.fixture()
def store10(linker) -> GraphStore:
    return build_store("feed10.json", "desk", linker)


@pytest.fixture()
def store5(linker) -> GraphStore:
    return build_store("feed5.json", "mini", linker)


@pytest.fixture()
def store6(linker) -> GraphStore:
    return build_store("feed6.json", "rel", linker)


def feed_items(feed_name: str):
    return json.loads((FIXTURES / feed_name).read_text("utf-8"))["items"]
