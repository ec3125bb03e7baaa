"""
Append-only reply cache keyed by request hash.
"""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path
from typing import Dict, Optional

logger = logging.getLogger(__name__)


class ReplyCache:
    """One JSON document per line: ``{"hash", "task_tag", "reply"}``."""

    def __init__(self, path: Optional[Path | str] = None) -> None:
        self.path = Path(path) if path is not None else None
        self._replies: Dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.is_file():
            self._load()

    def _load(self) -> None:
        assert self.path is not None
        with self.path.open(encoding="utf-8") as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    document = json.loads(line)
                except json.JSONDecodeError:
                    logger.warning("Skipping unreadable cache line %d in %s", number, self.path)
                    continue
                self._replies[document["hash"]] = document["reply"]
        logger.debug("Loaded %d cached replies from %s", len(self._replies), self.path)

    def __len__(self) -> int:
        return len(self._replies)

    def get(self, digest: str) -> Optional[str]:
        with self._lock:
            return self._replies.get(digest)

    def put(self, digest: str, task_tag: str, reply: str) -> None:
        with self._lock:
            if digest in self._replies:
                return
            self._replies[digest] = reply
            if self.path is None:
                return
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                line = {"hash": digest, "task_tag": task_tag, "reply": reply}
                handle.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + "\n")
