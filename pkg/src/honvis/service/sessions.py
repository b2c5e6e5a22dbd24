"""In-memory session registry with LRU eviction.

Sessions are the only mutable state the service owns. Each entry carries its
own lock so traces on different sessions proceed concurrently while the
registry lock only guards map membership and recency order.
"""

from __future__ import annotations

import secrets
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field

from ..subgraph import SubgraphSession

DEFAULT_CAPACITY = 64


@dataclass
class SessionEntry:
    session: SubgraphSession
    created_at: float
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._lock = threading.Lock()
        self._entries: OrderedDict[str, SessionEntry] = OrderedDict()

    def create(self, session: SubgraphSession) -> str:
        with self._lock:
            while True:
                session_id = secrets.token_hex(16)
                if session_id not in self._entries:
                    break
            session.session_id = session_id
            self._entries[session_id] = SessionEntry(session=session,
                                                     created_at=time.time())
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
            return session_id

    def get(self, session_id: str) -> SessionEntry | None:
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is not None:
                self._entries.move_to_end(session_id)
            return entry

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._entries.pop(session_id, None) is not None

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def ids(self) -> list[str]:
        with self._lock:
            return list(self._entries)
