"""News feed fetching, normalization, graph ingestion, and scheduling."""

from newsagent.ingest.feed import (
    ArticleRecord,
    FeedError,
    FeedNotFoundError,
    FeedSource,
    FeedTimeoutError,
    FetchResult,
    MalformedFeedError,
    NetworkError,
    fetch_feed,
    normalize,
)
from newsagent.ingest.pipeline import IngestReport, ingest, ingest_source
from newsagent.ingest.scheduler import Scheduler, SimulatedClock, SystemClock

__all__ = [
    "ArticleRecord",
    "FeedError",
    "FeedNotFoundError",
    "FeedSource",
    "FeedTimeoutError",
    "FetchResult",
    "IngestReport",
    "MalformedFeedError",
    "NetworkError",
    "Scheduler",
    "SimulatedClock",
    "SystemClock",
    "fetch_feed",
    "ingest",
    "ingest_source",
    "normalize",
]
