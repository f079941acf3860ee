"""Append-only JSONL cassette of provider responses, keyed by request fingerprint."""
from __future__ import annotations

import json
import logging
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from modules.errors import CassetteMissError, ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CassetteEntry:
    request_fingerprint: str
    request_tag: str
    response_text: str
    recorded_at: str


class Cassette:
    def __init__(self, path):
        self.path = Path(path)
        self._entries = {}
        self._lock = threading.Lock()
        if self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as file:
            for line_no, line in enumerate(file, start=1):
                if not line.strip():
                    continue
                try:
                    entry = CassetteEntry(**json.loads(line))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise ConfigError(f"{self.path}:{line_no}: malformed cassette entry: {exc}") from exc
                # first recording wins, so replays stay deterministic
                self._entries.setdefault(entry.request_fingerprint, entry)
        logger.info("stage=gateway event=cassette_loaded path=%s entries=%d", self.path, len(self._entries))

    def __len__(self):
        return len(self._entries)

    def __contains__(self, fingerprint):
        return fingerprint in self._entries

    def lookup(self, fingerprint, request_tag):
        entry = self._entries.get(fingerprint)
        if entry is None:
            raise CassetteMissError(fingerprint, request_tag)
        return entry

    def append(self, fingerprint, request_tag, response_text):
        entry = CassetteEntry(
            request_fingerprint=fingerprint,
            request_tag=request_tag,
            response_text=response_text,
            recorded_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        with self._lock:
            if fingerprint in self._entries:
                return self._entries[fingerprint]
            self._entries[fingerprint] = entry
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8", newline="\n") as file:
                file.write(json.dumps(asdict(entry), ensure_ascii=False, sort_keys=True) + "\n")
        return entry
