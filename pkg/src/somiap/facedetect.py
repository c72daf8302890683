"""Haar cascade model parsing and multi-scale sliding-window face detection."""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BoundsError, ContractError, ModelParseError, UnsupportedModelError
from .imagecore import IntegralImage, Rect, as_gray, integral

CASCADE_ENV = "SOMIAP_CASCADE"
CASCADE_FILENAME = "haarcascade_frontalface_default.xml"
DEFAULT_SCALE_STEP = 1.1
DEFAULT_MIN_NEIGHBORS = 3
DEFAULT_MIN_SIZE = 24
GROUP_EPS = 0.2


class HaarFeature(NamedTuple):
    rects: tuple  # ((Rect, weight), ...) in base-window coordinates


class WeakClassifier(NamedTuple):
    feature: int
    threshold: float
    left_value: float
    right_value: float


class Stage(NamedTuple):
    weak: tuple
    stage_threshold: float


class Detection(NamedTuple):
    rect: Rect
    neighbors: int


def _round(v):
    return np.floor(np.asarray(v, dtype=np.float64) + 0.5).astype(np.int64)


@dataclass(frozen=True)
class CascadeModel:
    window_w: int
    window_h: int
    stages: tuple
    features: tuple

    def __post_init__(self):
        if not self.stages:
            raise ContractError("cascade needs at least one stage")
        if self.window_w < 4 or self.window_h < 4:
            raise ContractError("cascade window must be at least 4x4")

    @cached_property
    def _stage_tables(self):
        """Per stage: rect corners (n, 3, 4), weights (n, 3), thresholds and leaf values."""
        tables = []
        for stage in self.stages:
            n = len(stage.weak)
            corners = np.zeros((n, 3, 4), dtype=np.float64)
            weights = np.zeros((n, 3), dtype=np.float64)
            for i, wc in enumerate(stage.weak):
                for j, (r, wt) in enumerate(self.features[wc.feature].rects):
                    corners[i, j] = (r.x, r.y, r.x + r.w, r.y + r.h)
                    weights[i, j] = wt
            thr = np.array([wc.threshold for wc in stage.weak])
            left = np.array([wc.left_value for wc in stage.weak])
            right = np.array([wc.right_value for wc in stage.weak])
            tables.append((corners, weights, thr, left, right, stage.stage_threshold))
        return tables


# --------------------------------------------------------------------------
# parsing


def _numbers(text, path, count=None, cast=float):
    parts = (text or "").split()
    try:
        values = [cast(p) for p in parts]
    except ValueError:
        raise ModelParseError(f"malformed number in {text!r}", path) from None
    if count is not None and len(values) != count:
        raise ModelParseError(f"expected {count} numbers, got {len(values)}", path)
    return values


def _child(node, tag, path):
    found = node.find(tag)
    if found is None:
        raise ModelParseError(f"missing <{tag}>", path)
    return found


def _scalar(node, tag, path, cast=float):
    return _numbers(_child(node, tag, path).text, f"{path}/{tag}", 1, cast)[0]


def parse_cascade(text: str | bytes) -> CascadeModel:
    """Parse a stump-based HAAR boosted cascade in the standard XML layout."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ModelParseError(f"invalid XML: {exc}") from None
    cascade = root if root.tag == "cascade" else root.find("cascade")
    if cascade is None:
        raise ModelParseError("missing <cascade>", root.tag)
    path = f"{root.tag}/cascade" if cascade is not root else "cascade"

    stage_type = (_child(cascade, "stageType", path).text or "").strip()
    feature_type = (_child(cascade, "featureType", path).text or "").strip()
    if stage_type != "BOOST":
        raise UnsupportedModelError(f"unsupported stageType {stage_type!r}", f"{path}/stageType")
    if feature_type != "HAAR":
        raise UnsupportedModelError(
            f"unsupported featureType {feature_type!r}", f"{path}/featureType"
        )
    width = _scalar(cascade, "width", path, int)
    height = _scalar(cascade, "height", path, int)

    features = []
    for fi, fnode in enumerate(_child(cascade, "features", path).findall("_")):
        fpath = f"{path}/features/{fi}"
        tilted = fnode.find("tilted")
        if tilted is not None and _numbers(tilted.text, f"{fpath}/tilted", 1, int)[0] != 0:
            raise UnsupportedModelError("tilted Haar features are not supported", fpath)
        rects = []
        for ri, rnode in enumerate(_child(fnode, "rects", fpath).findall("_")):
            x, y, w, h, wt = _numbers(rnode.text, f"{fpath}/rects/{ri}", 5)
            if not all(float(v).is_integer() for v in (x, y, w, h)):
                raise ModelParseError("rect coordinates must be integers", f"{fpath}/rects/{ri}")
            r = Rect(int(x), int(y), int(w), int(h))
            if r.w < 1 or r.h < 1 or r.x < 0 or r.y < 0 or r.x + r.w > width or r.y + r.h > height:
                raise ModelParseError(f"rect {tuple(r)} outside window", f"{fpath}/rects/{ri}")
            rects.append((r, wt))
        if not 2 <= len(rects) <= 3:
            raise ModelParseError(f"feature needs 2 or 3 rects, got {len(rects)}", fpath)
        features.append(HaarFeature(tuple(rects)))

    stages = []
    for si, snode in enumerate(_child(cascade, "stages", path).findall("_")):
        spath = f"{path}/stages/{si}"
        stage_threshold = _scalar(snode, "stageThreshold", spath)
        weak = []
        for wi, wnode in enumerate(_child(snode, "weakClassifiers", spath).findall("_")):
            wpath = f"{spath}/weakClassifiers/{wi}"
            nodes = _numbers(_child(wnode, "internalNodes", wpath).text, f"{wpath}/internalNodes")
            leaves = _numbers(_child(wnode, "leafValues", wpath).text, f"{wpath}/leafValues")
            if len(nodes) != 4 or len(leaves) != 2:
                raise UnsupportedModelError("only depth-1 stump trees are supported", wpath)
            left, right, fidx, thr = nodes
            if left != 0 or right != -1 or not float(fidx).is_integer():
                raise UnsupportedModelError("only depth-1 stump trees are supported", wpath)
            fidx = int(fidx)
            if not 0 <= fidx < len(features):
                raise ModelParseError(f"feature index {fidx} out of range", f"{wpath}/internalNodes")
            weak.append(WeakClassifier(fidx, thr, leaves[0], leaves[1]))
        if not weak:
            raise ModelParseError("stage has no weak classifiers", spath)
        stages.append(Stage(tuple(weak), stage_threshold))
    if not stages:
        raise ModelParseError("cascade has no stages", f"{path}/stages")
    return CascadeModel(width, height, tuple(stages), tuple(features))


def load_cascade(path) -> CascadeModel:
    return parse_cascade(Path(path).read_bytes())


def serialize_cascade(model: CascadeModel) -> str:
    """Write ``model`` back in the XML layout read by :func:`parse_cascade`."""
    out = [
        '<?xml version="1.0"?>',
        "<opencv_storage>",
        '<cascade type_id="opencv-cascade-classifier">',
        "  <stageType>BOOST</stageType>",
        "  <featureType>HAAR</featureType>",
        f"  <height>{model.window_h}</height>",
        f"  <width>{model.window_w}</width>",
        f"  <stageNum>{len(model.stages)}</stageNum>",
        "  <stages>",
    ]
    for stage in model.stages:
        out.append("    <_>")
        out.append(f"      <maxWeakCount>{len(stage.weak)}</maxWeakCount>")
        out.append(f"      <stageThreshold>{stage.stage_threshold!r}</stageThreshold>")
        out.append("      <weakClassifiers>")
        for wc in stage.weak:
            out.append(
                f"        <_><internalNodes>0 -1 {wc.feature} {wc.threshold!r}</internalNodes>"
                f"<leafValues>{wc.left_value!r} {wc.right_value!r}</leafValues></_>"
            )
        out.append("      </weakClassifiers></_>")
    out.append("  </stages>")
    out.append("  <features>")
    for feat in model.features:
        rects = "".join(f"<_>{r.x} {r.y} {r.w} {r.h} {wt!r}</_>" for r, wt in feat.rects)
        out.append(f"    <_><rects>{rects}</rects></_>")
    out.append("  </features></cascade>")
    out.append("</opencv_storage>")
    return "\n".join(out) + "\n"


def default_cascade_path() -> Path:
    """``$SOMIAP_CASCADE`` if set, else the user cache location used by ``cascade-fetch``."""
    env = os.environ.get(CASCADE_ENV)
    if env:
        return Path(env)
    cache = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(cache) / "somiap" / CASCADE_FILENAME


# --------------------------------------------------------------------------
# evaluation


def _window_size(model: CascadeModel, scale: float):
    win_w = int(_round(model.window_w * scale))
    win_h = int(_round(model.window_h * scale))
    return win_w, win_h


def _norm_rect(win_w: int, win_h: int, scale: float):
    """Inner rect used for variance normalisation: the window inset by one scaled pixel."""
    inset = int(_round(scale))
    return inset, inset, max(1, win_w - 2 * inset), max(1, win_h - 2 * inset)


def _window_sigma(ii: IntegralImage, xs, ys, nx, ny, nw, nh):
    s, q = ii.sums, ii.squared_sums
    x0, y0 = xs + nx, ys + ny
    total = s[y0 + nh, x0 + nw] - s[y0, x0 + nw] - s[y0 + nh, x0] + s[y0, x0]
    sq = q[y0 + nh, x0 + nw] - q[y0, x0 + nw] - q[y0 + nh, x0] + q[y0, x0]
    area = float(nw * nh)
    mean = total / area
    var = sq / area - mean * mean
    sigma = np.sqrt(np.maximum(var, 0.0))
    return np.where(sigma < 1.0, 1.0, sigma)


def _balanced_weights(corners: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Re-derive the first rect weight so each scaled feature is zero on a flat window.

    Rounding scaled rects breaks the exact area balance of the base features;
    without this a feature picks up a bias proportional to the window mean.
    """
    areas = (corners[..., 2] - corners[..., 0]) * (corners[..., 3] - corners[..., 1])
    out = weights.copy()
    out[:, 0] = -(weights[:, 1:] * areas[:, 1:]).sum(axis=1) / areas[:, 0]
    return out


def _eval_windows(model: CascadeModel, ii: IntegralImage, xs, ys, scale: float, early_exit=True):
    """Boolean acceptance for many windows sharing one scale."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    win_w, win_h = _window_size(model, scale)
    nx, ny, nw, nh = _norm_rect(win_w, win_h, scale)
    area = float(nw * nh)
    alive = np.ones(len(xs), dtype=bool)
    sigma = _window_sigma(ii, xs, ys, nx, ny, nw, nh)
    flat = ii.sums.ravel()
    stride = ii.sums.shape[1]
    chunk = 1 << 20
    for corners, weights, thr, left, right, stage_thr in model._stage_tables:
        idx = np.nonzero(alive)[0] if early_exit else np.arange(len(xs))
        if len(idx) == 0:
            break
        sc = _round(corners * scale)  # (n, 3, 4): x0, y0, x1, y1
        weights = _balanced_weights(sc, weights)
        n = len(thr)
        passed = np.empty(len(idx), dtype=bool)
        step = max(1, chunk // (n * 3))
        for start in range(0, len(idx), step):
            part = idx[start : start + step]
            bx = xs[part][:, None, None]
            by = ys[part][:, None, None]
            x0, y0, x1, y1 = (sc[None, :, :, k] for k in range(4))
            sums = (
                flat[(by + y1) * stride + bx + x1]
                - flat[(by + y0) * stride + bx + x1]
                - flat[(by + y1) * stride + bx + x0]
                + flat[(by + y0) * stride + bx + x0]
            )
            value = (sums * weights[None]).sum(axis=2)
            limit = thr[None, :] * (sigma[part][:, None] * area)
            votes = np.where(value < limit, left[None, :], right[None, :]).sum(axis=1)
            passed[start : start + step] = votes >= stage_thr
        if early_exit:
            alive[idx[~passed]] = False
        else:
            alive &= passed
    return alive


def eval_window(model: CascadeModel, ii: IntegralImage, x: int, y: int, scale: float) -> bool:
    """Run the cascade on one window with top-left ``(x, y)`` at ``scale``."""
    win_w, win_h = _window_size(model, scale)
    if x < 0 or y < 0 or x + win_w > ii.width or y + win_h > ii.height:
        raise BoundsError(f"window ({x}, {y}, {win_w}, {win_h}) outside {ii.width}x{ii.height} image")
    return bool(_eval_windows(model, ii, [x], [y], scale)[0])


def _similar(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise similarity of rect arrays ``(n, 4)`` against ``(m, 4)``."""
    wmin = np.minimum(a[:, None, 2], b[None, :, 2])
    wmax = np.maximum(a[:, None, 2], b[None, :, 2])
    hmin = np.minimum(a[:, None, 3], b[None, :, 3])
    hmax = np.maximum(a[:, None, 3], b[None, :, 3])
    delta = GROUP_EPS * wmin
    return (
        (np.abs(a[:, None, 0] - b[None, :, 0]) <= delta)
        & (np.abs(a[:, None, 1] - b[None, :, 1]) <= delta)
        & (wmax <= (1 + GROUP_EPS) * wmin)
        & (hmax <= (1 + GROUP_EPS) * hmin)
    )


def rects_similar(a: Rect, b: Rect) -> bool:
    """Offsets within 20% of the narrower width and sizes within 20%."""
    return bool(_similar(np.array([a], float), np.array([b], float))[0, 0])


def group_rects(raw, min_neighbors: int = DEFAULT_MIN_NEIGHBORS) -> list[Detection]:
    """Cluster similar rects transitively and average each large enough cluster."""
    if len(raw) == 0:
        return []
    arr = np.array([tuple(r) for r in raw], dtype=np.float64)
    adj = _similar(arr, arr)
    n_comp, labels = connected_components(csr_matrix(adj), directed=False)
    out = []
    for c in range(n_comp):
        members = arr[labels == c]
        if len(members) < min_neighbors + 1:
            continue
        x, y, w, h = (int(v) for v in _round(members.mean(axis=0)))
        out.append(Detection(Rect(x, y, w, h), len(members)))
    out.sort(key=lambda d: (d.rect.y, d.rect.x, d.rect.w, d.rect.h))
    return out


def scan_scales(model: CascadeModel, img_w: int, img_h: int, scale_step: float, min_size: int):
    s = 1.0
    while True:
        win_w, win_h = _window_size(model, s)
        if win_w > img_w or win_h > img_h:
            break
        if min(win_w, win_h) >= min_size:
            yield s, win_w, win_h
        s *= scale_step


def raw_detections(model, img, scale_step=DEFAULT_SCALE_STEP, min_size=DEFAULT_MIN_SIZE):
    img = as_gray(img)
    if scale_step <= 1:
        raise ContractError(f"scale_step must exceed 1, got {scale_step}")
    h, w = img.shape
    ii = integral(img)
    hits = []
    for s, win_w, win_h in scan_scales(model, w, h, scale_step, min_size):
        stride = max(1, int(_round(s)))
        gy, gx = np.mgrid[0 : h - win_h + 1 : stride, 0 : w - win_w + 1 : stride]
        gx, gy = gx.ravel(), gy.ravel()
        ok = _eval_windows(model, ii, gx, gy, s)
        hits.extend(Rect(int(x), int(y), win_w, win_h) for x, y in zip(gx[ok], gy[ok]))
    return hits


def detect_multiscale(
    model: CascadeModel,
    img: np.ndarray,
    scale_step: float = DEFAULT_SCALE_STEP,
    min_neighbors: int = DEFAULT_MIN_NEIGHBORS,
    min_size: int = DEFAULT_MIN_SIZE,
) -> list[Detection]:
    """Sliding-window detection over scales ``1, step, step**2, ...``.

    Window stride is ``round(scale)`` pixels; raw hits are merged by
    :func:`group_rects`.
    """
    return group_rects(raw_detections(model, img, scale_step, min_size), min_neighbors)


def largest(detections) -> Detection | None:
    if not detections:
        return None
    return max(detections, key=lambda d: (d.rect.w * d.rect.h, d.neighbors, -d.rect.y, -d.rect.x))


def iou(a: Rect, b: Rect) -> float:
    ix = max(0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union if union else 0.0

