"""On-disk cache: one canonical JSON file per entry, written atomically."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

SCHEMA_VERSION = 1
ENV_VAR = "HILBERT_SIEGEL_CACHE"

log = logging.getLogger(__name__)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "hilbert_siegel"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Cache:
    """Content-addressed entries keyed by (kind, params); ``None`` disables caching."""

    def __init__(self, root: str | os.PathLike | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.enabled = enabled

    def _path(self, kind: str, params: dict) -> Path:
        digest = hashlib.sha256(canonical_json({"kind": kind, "params": params}).encode()).hexdigest()
        return self.root / kind / f"{digest[:32]}.json"

    def get(self, kind: str, params: dict):
        if not self.enabled:
            return None
        path = self._path(kind, params)
        if not path.exists():
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                header = fh.readline()
                body = json.loads(fh.read())
            if json.loads(header) != {"schema": SCHEMA_VERSION}:
                raise ValueError("schema version mismatch")
            if body.get("kind") != kind or body.get("params") != json.loads(canonical_json(params)):
                raise ValueError("key mismatch")
            return body["payload"]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            log.warning("discarding cache entry %s: %s", path, exc)
            try:
                path.unlink()
            except OSError:
                pass
            return None

    def put(self, kind: str, params: dict, payload) -> None:
        if not self.enabled:
            return
        path = self._path(kind, params)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = canonical_json({"schema": SCHEMA_VERSION}) + "\n" + canonical_json(
            {"kind": kind, "params": params, "payload": payload})
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def clear(self) -> int:
        """Delete every cache entry; returns the number removed."""
        n = 0
        if not self.root.exists():
            return 0
        for p in self.root.rglob("*.json"):
            p.unlink()
            n += 1
        return n
