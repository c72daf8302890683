"""Place matching (feature gate, then hash comparison) and the combined
place + identity analysis of a query photo."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import facedetect, facerecog
from .errors import ConflictError, ContractError, SomiapError
from .features import DescriptorSet, match_descriptors, orb_detect_describe
from .hashing import DEFAULT_THRESHOLDS, HashAlgo, HashDigest, compute_hash, hamming
from .imagecore import Rect, as_color, to_gray

REPORT_VERSION = 1
NO_HASH = -1


@dataclass(frozen=True)
class PlaceConfig:
    primary_algo: HashAlgo = HashAlgo.PHASH_COLOR
    algos: tuple = tuple(HashAlgo)
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    min_feature_matches: int = 25
    ratio: float = 0.75
    n_features: int = 500

    def __post_init__(self):
        object.__setattr__(self, "primary_algo", HashAlgo(self.primary_algo))
        object.__setattr__(self, "algos", tuple(HashAlgo(a) for a in self.algos))
        object.__setattr__(
            self, "thresholds", {HashAlgo(k): int(v) for k, v in self.thresholds.items()}
        )
        if self.primary_algo not in self.algos:
            raise ContractError("primary hash algorithm must be among the stored algorithms")

    @property
    def threshold(self) -> int:
        return self.thresholds[self.primary_algo]

    def to_dict(self) -> dict:
        return {
            "primary_algo": self.primary_algo.value,
            "algos": [a.value for a in self.algos],
            "thresholds": {a.value: t for a, t in sorted(self.thresholds.items())},
            "min_feature_matches": self.min_feature_matches,
            "ratio": self.ratio,
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlaceConfig":
        return cls(**data)


@dataclass(frozen=True)
class PlaceEntry:
    id: str
    name: str
    descriptors: DescriptorSet
    digests: dict  # HashAlgo -> HashDigest
    source_hash: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "source_hash": self.source_hash,
            "digests": {a.value: str(d) for a, d in sorted(self.digests.items())},
            "features": self.descriptors.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlaceEntry":
        digests = {HashAlgo(k): HashDigest.parse(v) for k, v in data["digests"].items()}
        return cls(data["id"], data["name"], DescriptorSet.from_dict(data["features"]),
                   digests, data["source_hash"])


@dataclass(frozen=True)
class PlaceIndex:
    entries: tuple = ()
    config: PlaceConfig = field(default_factory=PlaceConfig)

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ConflictError("place ids must be unique")

    def __len__(self):
        return len(self.entries)

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]


class PlaceMatch(NamedTuple):
    entry_id: str
    feature_matches: int
    hash_distance: int
    accepted: bool


def content_hash(img: np.ndarray) -> str:
    img = np.ascontiguousarray(img)
    h = hashlib.sha256()
    h.update(("%dx%dx%d:" % (img.shape[1], img.shape[0], img.shape[2] if img.ndim == 3 else 1)).encode())
    h.update(img.tobytes())
    return h.hexdigest()


def _describe(img: np.ndarray, n: int) -> DescriptorSet:
    gray = to_gray(img)
    if min(gray.shape) < 32:
        return DescriptorSet()
    return orb_detect_describe(gray, n)


def enroll_place(index: PlaceIndex, img: np.ndarray, id: str, name: str = "") -> PlaceIndex:
    """Return a new index with ``img`` enrolled under ``id``."""
    img = as_color(img)
    if id in index.ids():
        raise ConflictError(f"place id {id!r} already enrolled")
    cfg = index.config
    entry = PlaceEntry(
        id=id,
        name=name or id,
        descriptors=_describe(img, cfg.n_features),
        digests={a: compute_hash(img, a) for a in cfg.algos},
        source_hash=content_hash(img),
    )
    return replace(index, entries=index.entries + (entry,))


def rank_key(m: PlaceMatch):
    gated_out = m.hash_distance == NO_HASH
    return (not m.accepted, gated_out, m.hash_distance, -m.feature_matches, m.entry_id)


def match_place(index: PlaceIndex, img: np.ndarray) -> list[PlaceMatch]:
    """Score every entry: feature gate first, then Hamming distance on the primary hash.

    Entries failing the gate carry ``hash_distance == -1``. The list is
    ordered accepted-first, then gate survivors before gate failures, then
    by hash distance, match count and id.
    """
    img = as_color(img)
    if not index.entries:
        return []
    cfg = index.config
    query_desc = _describe(img, cfg.n_features)
    query_digest = None
    out = []
    for entry in index.entries:
        good = match_descriptors(query_desc, entry.descriptors, cfg.ratio).good_count
        if good < cfg.min_feature_matches:
            out.append(PlaceMatch(entry.id, good, NO_HASH, False))
            continue
        if query_digest is None:
            query_digest = compute_hash(img, cfg.primary_algo)
        dist = hamming(query_digest, entry.digests[cfg.primary_algo])
        out.append(PlaceMatch(entry.id, good, dist, dist <= cfg.threshold))
    out.sort(key=rank_key)
    return out


# --------------------------------------------------------------------------
# combined analysis


class FaceResult(NamedTuple):
    detection: facedetect.Detection
    prediction: facerecog.Prediction | None


@dataclass
class AnalysisReport:
    query_id: str
    place: PlaceMatch | None
    candidates: list
    faces: list
    timings: dict

    def to_dict(self) -> dict:
        def match(m):
            return None if m is None else m._asdict()

        faces = []
        for f in self.faces:
            row = {"rect": list(f.detection.rect), "neighbors": f.detection.neighbors,
                   "label": None, "distance": None, "threshold": None}
            if f.prediction is not None:
                thr = f.prediction.threshold_applied
                row.update(label=f.prediction.label, distance=f.prediction.distance,
                           threshold=None if np.isinf(thr) else thr)
            faces.append(row)
        return {
            "version": REPORT_VERSION,
            "query_id": self.query_id,
            "place": match(self.place),
            "candidates": [match(m) for m in self.candidates],
            "faces": faces,
            "timings_ms": dict(self.timings),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        if data.get("version") != REPORT_VERSION:
            raise ContractError(f"unsupported report version {data.get('version')!r}")

        def match(d):
            return None if d is None else PlaceMatch(**d)

        faces = []
        for row in data["faces"]:
            det = facedetect.Detection(Rect(*row["rect"]), row["neighbors"])
            pred = None
            if row["label"] is not None:
                thr = float("inf") if row["threshold"] is None else row["threshold"]
                pred = facerecog.Prediction(row["label"], row["distance"], thr)
            faces.append(FaceResult(det, pred))
        return cls(data["query_id"], match(data["place"]),
                   [match(m) for m in data["candidates"]], faces, dict(data["timings_ms"]))

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"query {self.query_id[:16]}"]
        lines.append("place " + (self.place.entry_id if self.place else "NONE"))
        for m in self.candidates:
            lines.append(
                f"candidate {m.entry_id} matches={m.feature_matches} "
                f"hash={m.hash_distance} {'accepted' if m.accepted else 'rejected'}"
            )
        for f in self.faces:
            r = f.detection.rect
            who = f.prediction.label if f.prediction else "-"
            dist = f"{f.prediction.distance:.3f}" if f.prediction else "-"
            lines.append(f"face {r.x},{r.y},{r.w}x{r.h} neighbors={f.detection.neighbors} label={who} distance={dist}")
        return "\n".join(lines)


class StageError(SomiapError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


def analyze(
    index: PlaceIndex | None,
    cascade: facedetect.CascadeModel | None,
    faces: facerecog.FaceModel | None,
    img: np.ndarray,
    *,
    scale_step: float = facedetect.DEFAULT_SCALE_STEP,
    min_neighbors: int = facedetect.DEFAULT_MIN_NEIGHBORS,
    min_size: int = facedetect.DEFAULT_MIN_SIZE,
) -> AnalysisReport:
    """Locate the place and identify the people in one photo.

    Any of ``index``, ``cascade`` and ``faces`` may be ``None``; the
    corresponding stage is then skipped. Errors are re-raised as
    :class:`StageError` naming the stage.
    """
    img = as_color(img)
    timings = {}

    def timed(stage, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        except SomiapError as exc:
            raise StageError(stage, exc) from exc
        finally:
            timings[stage] = (time.perf_counter() - t0) * 1000.0

    candidates = []
    if index is not None:
        candidates = timed("place", lambda: match_place(index, img))
    place = candidates[0] if candidates and candidates[0].accepted else None

    results = []
    if cascade is not None:
        gray = to_gray(img)
        dets = timed("detect", lambda: facedetect.detect_multiscale(
            cascade, gray, scale_step, min_neighbors, min_size))
        if faces is not None:
            size = (faces.shape[1], faces.shape[0])

            def recognise():
                return [facerecog.predict(faces, facerecog.normalize_face(gray, d.rect, size))
                        for d in dets]

            preds = timed("recognize", recognise)
        else:
            preds = [None] * len(dets)
        results = [FaceResult(d, p) for d, p in zip(dets, preds)]

    return AnalysisReport(content_hash(img), place, candidates, results, timings)
