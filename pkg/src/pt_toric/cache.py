"""Append-only JSON-lines store of computed coefficients."""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path

from filelock import FileLock

log = logging.getLogger(__name__)

__all__ = ["ResultCache", "cache_key"]


def cache_key(rec: dict) -> tuple:
    deg = rec["degree"]
    deg = tuple(deg) if isinstance(deg, list) else (deg,)
    return (rec["surface"], deg, int(rec["m"]), rec["convention_version"])


class ResultCache:
    """One ResultRecord per line, keyed by (surface, degree, m, convention_version).

    Later lines win.  A line that does not parse (typically a torn final write)
    is skipped.  Writes hold a process-wide lock and an OS file lock.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._flock = FileLock(str(self.path) + ".lock")
        self._index: dict[tuple, dict] | None = None

    def _load(self) -> dict[tuple, dict]:
        index: dict[tuple, dict] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        index[cache_key(rec)] = rec
                    except (ValueError, KeyError, TypeError):
                        log.warning("%s:%d: skipping malformed cache line", self.path, lineno)
        return index

    def records(self) -> dict[tuple, dict]:
        with self._lock:
            if self._index is None:
                self._index = self._load()
            return dict(self._index)

    def get(self, surface: str, degree, m: int, convention_version: str) -> dict | None:
        deg = tuple(degree) if isinstance(degree, (list, tuple)) else (degree,)
        return self.records().get((surface, deg, int(m), convention_version))

    def put(self, rec: dict) -> None:
        line = json.dumps(rec, sort_keys=True)
        with self._lock, self._flock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a+b") as fh:
                fh.seek(0, 2)
                if fh.tell():
                    fh.seek(-1, 2)
                    if fh.read(1) != b"\n":
                        # never glue a record onto a torn line
                        fh.write(b"\n")
                fh.write(line.encode("utf-8") + b"\n")
            if self._index is not None:
                self._index[cache_key(rec)] = rec

    def reload(self) -> None:
        with self._lock:
            self._index = None
