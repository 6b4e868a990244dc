"""Fixed-cadence feed polling driven by an injected clock.

Every source is fetched once at startup and then every ``interval_s``
seconds on a fixed grid (t0, t0+i, t0+2i, ...). A failing tick is
logged and the source simply retries at its next grid point; ticks for
one source never overlap because the loop is single-threaded per
scheduler.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from newsagent.ingest.feed import FeedError, FeedSource

logger = logging.getLogger(__name__)

# job signature: (source) -> None; exceptions are caught and logged
Job = Callable[[FeedSource], None]


class SimulatedClock:
    """Deterministic clock for tests; sleeping advances time instantly."""

    def __init__(self, start: float = 0.0):
        self.now_s = start

    def now(self) -> float:
        return self.now_s

    def sleep(self, seconds: float) -> bool:
        """Advance time; returns False (never interrupted)."""
        self.now_s += max(0.0, seconds)
        return False


class SystemClock:
    """Wall clock; sleep is interruptible through a stop event."""

    def __init__(self):
        import time

        self._time = time
        self._stop = threading.Event()

    def now(self) -> float:
        return self._time.monotonic()

    def sleep(self, seconds: float) -> bool:
        """Returns True when interrupted by stop()."""
        return self._stop.wait(max(0.0, seconds))

    def stop(self):
        self._stop.set()


class Scheduler:
    def __init__(self, sources: Sequence[FeedSource], job: Job, clock=None):
        if not sources:
            raise ValueError("scheduler needs at least one source")
        self.sources = list(sources)
        self.job = job
        self.clock = clock if clock is not None else SystemClock()
        self._thread: Optional[threading.Thread] = None
        self.fetch_log: List[tuple] = []  # (source_id, timestamp)

    def _run_job(self, source: FeedSource, due: float):
        self.fetch_log.append((source.id, due))
        try:
            self.job(source)
        except FeedError as exc:
            logger.warning("fetch of %s failed, retrying next tick: %s", source.id, exc)
        except Exception:
            logger.exception("ingest job for %s crashed", source.id)

    def run(self, until: Optional[float] = None):
        """Drive the schedule; with ``until`` set, stop after that instant."""
        t0 = self.clock.now()
        due: Dict[str, float] = {source.id: t0 for source in self.sources}
        by_id = {source.id: source for source in self.sources}
        while True:
            next_id = min(due, key=lambda sid: (due[sid], sid))
            next_due = due[next_id]
            if until is not None and next_due > until:
                return
            interrupted = self.clock.sleep(next_due - self.clock.now())
            if interrupted:
                return
            self._run_job(by_id[next_id], next_due)
            due[next_id] = next_due + by_id[next_id].interval_s

    def start(self):
        """Run in a daemon thread (service mode)."""
        self._thread = threading.Thread(target=self.run, name="feed-scheduler", daemon=True)
        self._thread.start()

    def stop(self, timeout: float = 5.0):
        stopper = getattr(self.clock, "stop", None)
        if stopper:
            stopper()
        if self._thread is not None:
            self._thread.join(timeout)
