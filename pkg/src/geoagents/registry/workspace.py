"""Task workspace: the only directory a dispatched call may touch."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from ..errors import GeoError
from ..model import FileMetadata, collection_metadata
from ..ops.io import read_collection


class PathEscapeError(GeoError):
    code = "path_escape"


@dataclass
class Workspace:
    root: Path
    # transport for DownloadGeoJSONData; None means real network access
    transport: httpx.BaseTransport | None = None
    _meta_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.root = Path(self.root).resolve()

    def resolve(self, path: str | os.PathLike) -> Path:
        """Absolute path for ``path``, which must stay inside the workspace."""
        p = Path(path)
        full = (p if p.is_absolute() else self.root / p).resolve()
        if full != self.root and self.root not in full.parents:
            raise PathEscapeError(f"path {str(path)!r} resolves outside the task workspace")
        return full

    def relative(self, path: Path) -> str:
        return Path(path).resolve().relative_to(self.root).as_posix()

    def metadata(self, path: str) -> FileMetadata | None:
        """Metadata of a GeoJSON file in the workspace, or ``None`` if unavailable."""
        try:
            full = self.resolve(path)
        except PathEscapeError:
            return None
        if full.suffix.lower() not in (".geojson", ".json") or not full.is_file():
            return None
        stamp = full.stat().st_mtime_ns
        hit = self._meta_cache.get(full)
        if hit is not None and hit[0] == stamp:
            return hit[1]
        try:
            meta = collection_metadata(read_collection(full), self.relative(full))
        except GeoError:
            return None
        self._meta_cache[full] = (stamp, meta)
        return meta
