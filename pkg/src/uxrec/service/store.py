"""File-backed session persistence: one JSON file per session, written
atomically (temp file + rename in the same directory). Disk is the source
of truth; every handler re-reads under the session's lock, so a crashed
or failed mutation can never leave a half-written record."""

from __future__ import annotations

import json
import os
import tempfile
import threading
from contextlib import contextmanager
from pathlib import Path

from ..errors import NotFound
from .sessions import ProjectSession


class SessionStore:
    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def _path(self, session_id: str) -> Path:
        if not session_id or "/" in session_id or session_id.startswith("."):
            raise NotFound(f"no session {session_id!r}")
        return self.directory / f"{session_id}.json"

    @contextmanager
    def lock(self, session_id: str):
        with self._registry_lock:
            lock = self._locks.setdefault(session_id, threading.Lock())
        with lock:
            yield

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()

    def load(self, session_id: str) -> ProjectSession:
        path = self._path(session_id)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise NotFound(f"no session {session_id!r}")
        return ProjectSession.from_dict(raw)

    def save(self, session: ProjectSession) -> None:
        path = self._path(session.id)
        payload = json.dumps(session.to_dict(), indent=2, sort_keys=True,
                             ensure_ascii=False) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json")
                      if not p.name.startswith("."))
