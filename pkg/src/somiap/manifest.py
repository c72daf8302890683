"""On-disk index manifest: one JSON document holding config, places and the face model.

Writes go to a temporary file in the same directory followed by an atomic
rename, so an interrupted write leaves the previous manifest in place.
"""

from __future__ import annotations

import contextlib
import fcntl
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from . import facerecog
from .errors import ManifestError
from .pipeline import PlaceConfig, PlaceEntry, PlaceIndex

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Manifest:
    index: PlaceIndex
    face_model: object = None  # a facerecog model or None

    def to_dict(self) -> dict:
        return {
            "version": MANIFEST_VERSION,
            "config": self.index.config.to_dict(),
            "places": [e.to_dict() for e in self.index.entries],
            "face_model": None if self.face_model is None else facerecog.model_to_dict(self.face_model),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Manifest":
        version = data.get("version")
        if version != MANIFEST_VERSION:
            raise ManifestError(f"unsupported manifest version {version!r}")
        try:
            config = PlaceConfig.from_dict(data["config"])
            entries = tuple(PlaceEntry.from_dict(e) for e in data["places"])
            model = data.get("face_model")
            face_model = None if model is None else facerecog.model_from_dict(model)
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"malformed manifest: {exc}") from exc
        return cls(PlaceIndex(entries, config), face_model)


def dumps(manifest: Manifest) -> str:
    return json.dumps(manifest.to_dict(), sort_keys=True, indent=1) + "\n"


def loads(text: str) -> Manifest:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    return Manifest.from_dict(data)


def load(path) -> Manifest:
    return loads(Path(path).read_text(encoding="utf-8"))


def load_or_new(path, config: PlaceConfig | None = None) -> Manifest:
    if Path(path).exists():
        return load(path)
    return Manifest(PlaceIndex(config=config or PlaceConfig()))


def atomic_write(path, payload: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def save(path, manifest: Manifest) -> None:
    atomic_write(path, dumps(manifest))


@contextlib.contextmanager
def locked(path):
    """Hold an exclusive advisory lock on ``<path>.lock`` for the block."""
    lock_path = Path(str(path) + ".lock")
    with open(lock_path, "a") as fh:
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            raise ManifestError(f"{path} is locked by another process") from None
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)
