"""Run configuration shared by the CLI and the scripts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .cache import Cache, default_cache_dir


@dataclass(frozen=True)
class RunConfig:
    cache_dir: Path | None = None
    use_cache: bool = True
    threads: int = 1
    fixture: Path | None = None
    disc: int = 5
    as_json: bool = False

    def cache(self) -> Cache | None:
        if not self.use_cache:
            return None
        return Cache(self.cache_dir or default_cache_dir())
