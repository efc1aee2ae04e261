"""Persistent JSON-lines store of exact results, keyed per engine version."""

from __future__ import annotations

import json
import time
from pathlib import Path

from .errors import CorruptCache

ENGINE_VERSION = "1.0"
CACHE_HEADER = "davlab-cache v1"


def _key(key: dict) -> str:
    return json.dumps(key, sort_keys=True, separators=(",", ":"))


class ResultCache:
    """Append-only cache file: a header line, then one JSON record per line.

    Each record is ``{"key": ..., "engine": ..., "timestamp": ..., "payload": ...}``.
    Only exhaustive payloads are stored.
    """

    def __init__(self, path, engine: str = ENGINE_VERSION):
        self.path = Path(path)
        self.engine = engine
        self._records: dict[str, dict] = {}
        if self.path.exists() and self.path.stat().st_size:
            lines = self.path.read_text().splitlines()
            if lines[0].strip() != CACHE_HEADER:
                raise CorruptCache(f"{self.path} does not start with {CACHE_HEADER!r}")
            for lineno, line in enumerate(lines[1:], start=2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    self._records[self._slot(rec["key"], rec["engine"])] = rec
                except (ValueError, KeyError) as exc:
                    raise CorruptCache(f"{self.path}:{lineno}: {exc}") from exc

    @staticmethod
    def _slot(key: dict, engine: str) -> str:
        return f"{engine}|{_key(key)}"

    def get(self, key: dict) -> dict | None:
        rec = self._records.get(self._slot(key, self.engine))
        return None if rec is None else rec["payload"]

    def put(self, key: dict, payload: dict) -> None:
        slot = self._slot(key, self.engine)
        if slot in self._records:
            return
        rec = {"key": key, "engine": self.engine, "timestamp": time.time(), "payload": payload}
        self._records[slot] = rec
        new_file = not self.path.exists() or self.path.stat().st_size == 0
        with self.path.open("a") as fh:
            if new_file:
                fh.write(CACHE_HEADER + "\n")
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
