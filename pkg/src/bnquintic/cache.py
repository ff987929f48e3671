"""Append-only JSON cache of point counts keyed by (variety, p)."""

from __future__ import annotations

import json
import os
from pathlib import Path

from . import __version__

ENV_VAR = "BNQUINTIC_CACHE"


class CacheConflictError(ValueError):
    pass


def resolve_path(path: str | None) -> Path | None:
    """Explicit path, else $BNQUINTIC_CACHE, else no cache."""
    if path:
        return Path(path)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else None


class CountCache:
    """Counts stored as ``{"tool_version": ..., "entries": [...]}``.

    Entries are never overwritten: storing a different count under an
    existing key raises ``CacheConflictError``.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.entries: dict[tuple[str, int], dict] = {}
        self.dirty = False
        if self.path is not None and self.path.exists():
            doc = json.loads(self.path.read_text())
            for e in doc.get("entries", []):
                self.entries[(e["variety"], int(e["p"]))] = e

    def __len__(self):
        return len(self.entries)

    def __contains__(self, key):
        return key in self.entries

    def get(self, variety: str, p: int) -> int | None:
        e = self.entries.get((variety, p))
        return None if e is None else int(e["count"])

    def put(self, variety: str, p: int, count: int, method: str = "fast") -> None:
        key = (variety, int(p))
        old = self.entries.get(key)
        if old is not None:
            if int(old["count"]) != int(count):
                raise CacheConflictError(
                    f"cache holds {variety}({p}) = {old['count']}, refusing to replace with {count}")
            return
        self.entries[key] = {
            "variety": variety,
            "p": int(p),
            "count": int(count),
            "method": method,
            "tool_version": __version__,
        }
        self.dirty = True

    def to_dict(self) -> dict:
        return {
            "tool_version": __version__,
            "entries": [self.entries[k] for k in sorted(self.entries)],
        }

    def save(self) -> None:
        if self.path is None or not self.dirty:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text(json.dumps(self.to_dict(), indent=1) + "\n")
        tmp.replace(self.path)
        self.dirty = False
