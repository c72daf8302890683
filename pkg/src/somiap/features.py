"""Oriented FAST keypoints, rotated binary descriptors and ratio-test matching."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._orb_pattern import PATTERN
from .errors import ContractError
from .imagecore import as_gray, resize_bilinear

# Bresenham circle of radius 3, clockwise from 12 o'clock, as (dx, dy).
CIRCLE = (
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)
ARC = 9
N_LEVELS = 8
SCALE_FACTOR = 1.2
FAST_THRESHOLD = 20
N_FEATURES = 500
HARRIS_K = 0.04
HARRIS_BLOCK = 7
PATCH_RADIUS = 15
ANGLE_BINS = 30
DESCRIPTOR_BYTES = 32
# rotated pattern reaches 15 * sqrt(2) px, plus 2 px of box smoothing
EDGE = 24
MIN_SIDE = 32


class Keypoint(NamedTuple):
    x: float
    y: float
    level: int
    angle: float
    response: float


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    keypoints: tuple = ()
    descriptors: np.ndarray = field(
        default_factory=lambda: np.zeros((0, DESCRIPTOR_BYTES), dtype=np.uint8)
    )

    def __post_init__(self):
        if len(self.keypoints) != len(self.descriptors):
            raise ContractError("keypoints and descriptors must have equal length")

    def __len__(self):
        return len(self.keypoints)

    def __eq__(self, other):
        if not isinstance(other, DescriptorSet):
            return NotImplemented
        return self.keypoints == other.keypoints and np.array_equal(
            self.descriptors, other.descriptors
        )

    def to_dict(self) -> dict:
        return {
            "keypoints": [list(kp) for kp in self.keypoints],
            "descriptors": [bytes(d).hex() for d in self.descriptors],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DescriptorSet":
        kps = tuple(
            Keypoint(float(x), float(y), int(lv), float(a), float(r))
            for x, y, lv, a, r in data["keypoints"]
        )
        desc = np.array(
            [np.frombuffer(bytes.fromhex(h), dtype=np.uint8) for h in data["descriptors"]],
            dtype=np.uint8,
        ).reshape(-1, DESCRIPTOR_BYTES)
        return cls(kps, desc)


class MatchReport(NamedTuple):
    pairs: list  # (query idx, train idx, distance) for every query descriptor
    passed: list  # ratio-test outcome per pair
    good_count: int


# --------------------------------------------------------------------------
# FAST


def fast_scores(img: np.ndarray, t: int) -> np.ndarray:
    """FAST-9 score map: the largest threshold at which each pixel is a corner.

    Pixels that are not corners at ``t`` (and the 3-pixel border) score 0.
    """
    if not 1 <= t <= 255:
        raise ContractError(f"FAST threshold must be in [1, 255], got {t}")
    img = as_gray(img)
    h, w = img.shape
    scores = np.zeros((h, w), dtype=np.int16)
    if h < 7 or w < 7:
        return scores
    src = img.astype(np.int16)
    center = src[3 : h - 3, 3 : w - 3]
    ring = np.stack([src[3 + dy : h - 3 + dy, 3 + dx : w - 3 + dx] for dx, dy in CIRCLE])
    best = np.full(center.shape, -1, dtype=np.int16)
    for diff in (ring - center, center - ring):
        ext = np.concatenate([diff, diff[: ARC - 1]])
        m2 = np.minimum(ext[:-1], ext[1:])
        m4 = np.minimum(m2[:-2], m2[2:])
        m8 = np.minimum(m4[:-4], m4[4:])
        m9 = np.minimum(m8[:16], ext[8:24])
        best = np.maximum(best, m9.max(axis=0))
    score = best - 1
    score[score < t] = 0
    scores[3 : h - 3, 3 : w - 3] = score
    return scores


def _nonmax(scores: np.ndarray) -> np.ndarray:
    """Mask of corners whose score is at least every 3x3 neighbour's."""
    h, w = scores.shape
    padded = np.zeros((h + 2, w + 2), dtype=scores.dtype)
    padded[1:-1, 1:-1] = scores
    neigh = np.max(
        [padded[1 + dy : h + 1 + dy, 1 + dx : w + 1 + dx]
         for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dx or dy],
        axis=0,
    )
    return (scores > 0) & (scores >= neigh)


def detect_fast(img: np.ndarray, t: int = FAST_THRESHOLD) -> list[Keypoint]:
    """FAST-9 corners after 3x3 non-maximum suppression, in raster order.

    ``response`` holds the FAST score; angle is left at 0.
    """
    scores = fast_scores(img, t)
    ys, xs = np.nonzero(_nonmax(scores))
    return [Keypoint(float(x), float(y), 0, 0.0, float(scores[y, x])) for y, x in zip(ys, xs)]


# --------------------------------------------------------------------------
# ORB


def _box_sum(values: np.ndarray, radius: int) -> np.ndarray:
    """Sum over a (2r+1)^2 window; entries within ``radius`` of the border are 0."""
    h, w = values.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.float64 if values.dtype.kind == "f" else np.int64)
    ii[1:, 1:] = values.cumsum(0).cumsum(1)
    k = 2 * radius + 1
    out = np.zeros_like(ii[1:, 1:])
    if h >= k and w >= k:
        out[radius : h - radius, radius : w - radius] = (
            ii[k:, k:] - ii[:-k, k:] - ii[k:, :-k] + ii[:-k, :-k]
        )
    return out


def harris_response(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Harris corner measure over a 7x7 window of Sobel gradients."""
    src = img.astype(np.float64)
    p = np.pad(src, 1, mode="edge")
    ix = (p[:-2, 2:] + 2 * p[1:-1, 2:] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[1:-1, :-2] + p[2:, :-2])
    iy = (p[2:, :-2] + 2 * p[2:, 1:-1] + p[2:, 2:]) - (p[:-2, :-2] + 2 * p[:-2, 1:-1] + p[:-2, 2:])
    scale = 1.0 / (4 * HARRIS_BLOCK * 255.0)
    ix *= scale
    iy *= scale
    r = HARRIS_BLOCK // 2
    sxx = _box_sum(ix * ix, r)[ys, xs]
    syy = _box_sum(iy * iy, r)[ys, xs]
    sxy = _box_sum(ix * iy, r)[ys, xs]
    return sxx * syy - sxy * sxy - HARRIS_K * (sxx + syy) ** 2


def _disc_offsets(radius: int):
    ys, xs = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    inside = xs * xs + ys * ys <= radius * radius
    return xs[inside], ys[inside]


_DISC_X, _DISC_Y = _disc_offsets(PATCH_RADIUS)


def _rotated_patterns() -> np.ndarray:
    base = np.array(PATTERN, dtype=np.float64)  # (256, 4)
    out = np.empty((ANGLE_BINS, len(base), 4), dtype=np.intp)
    for b in range(ANGLE_BINS):
        theta = 2 * math.pi * b / ANGLE_BINS
        c, s = math.cos(theta), math.sin(theta)
        for j in (0, 2):
            x, y = base[:, j], base[:, j + 1]
            out[b, :, j] = np.floor(c * x - s * y + 0.5)
            out[b, :, j + 1] = np.floor(s * x + c * y + 0.5)
    return out


_ROTATED = _rotated_patterns()


def orientation(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Intensity-centroid angle in [0, 2*pi) over a radius-15 disc."""
    patch = img[ys[:, None] + _DISC_Y[None, :], xs[:, None] + _DISC_X[None, :]].astype(np.float64)
    m10 = patch @ _DISC_X.astype(np.float64)
    m01 = patch @ _DISC_Y.astype(np.float64)
    return np.mod(np.arctan2(m01, m10), 2 * math.pi)


def describe(img: np.ndarray, xs: np.ndarray, ys: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """256-bit descriptors packed into ``(n, 32)`` uint8, MSB-first."""
    smooth = _box_sum(img.astype(np.int64), 2)
    bins = np.floor(angles / (2 * math.pi / ANGLE_BINS) + 0.5).astype(np.intp) % ANGLE_BINS
    pat = _ROTATED[bins]  # (n, 256, 4)
    x, y = xs[:, None], ys[:, None]
    a = smooth[y + pat[..., 1], x + pat[..., 0]]
    b = smooth[y + pat[..., 3], x + pat[..., 2]]
    return np.packbits(a < b, axis=1)


def build_pyramid(img: np.ndarray, n_levels: int = N_LEVELS, scale: float = SCALE_FACTOR):
    img = as_gray(img)
    h, w = img.shape
    levels = [img]
    for lv in range(1, n_levels):
        f = scale**lv
        lw, lh = int(round(w / f)), int(round(h / f))
        if min(lw, lh) < 2 * EDGE + 1:
            break
        levels.append(resize_bilinear(img, lw, lh))
    return levels


def orb_detect_describe(
    img: np.ndarray,
    n: int = N_FEATURES,
    *,
    n_levels: int = N_LEVELS,
    scale: float = SCALE_FACTOR,
    fast_threshold: int = FAST_THRESHOLD,
) -> DescriptorSet:
    """Detect up to ``n`` oriented keypoints over an image pyramid and describe them.

    Keypoints are ranked by Harris response (ties by level, then position)
    and reported in level-0 coordinates.
    """
    img = as_gray(img)
    h, w = img.shape
    if min(h, w) < MIN_SIDE:
        raise ContractError(f"image must be at least {MIN_SIDE}px on each side, got {w}x{h}")
    found = []  # (response, level, y, x, angle, descriptor)
    for lv, level in enumerate(build_pyramid(img, n_levels, scale)):
        lh, lw = level.shape
        mask = _nonmax(fast_scores(level, fast_threshold))
        mask[:EDGE] = mask[lh - EDGE :] = False
        mask[:, :EDGE] = mask[:, lw - EDGE :] = False
        ys, xs = np.nonzero(mask)
        if len(xs) == 0:
            continue
        resp = harris_response(level, xs, ys)
        ang = orientation(level, xs, ys)
        desc = describe(level, xs, ys, ang)
        sx, sy = w / lw, h / lh
        for i in range(len(xs)):
            found.append(
                (
                    float(resp[i]), lv, int(ys[i]), int(xs[i]),
                    (xs[i] + 0.5) * sx - 0.5, (ys[i] + 0.5) * sy - 0.5,
                    float(ang[i]), desc[i],
                )
            )
    found.sort(key=lambda f: (-f[0], f[1], f[2], f[3]))
    found = found[:n]
    kps = tuple(Keypoint(float(f[4]), float(f[5]), f[1], f[6], f[0]) for f in found)
    desc = np.array([f[7] for f in found], dtype=np.uint8).reshape(-1, DESCRIPTOR_BYTES)
    return DescriptorSet(kps, desc)


# --------------------------------------------------------------------------
# matching


def hamming_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Hamming distances between two packed descriptor arrays."""
    a64 = np.ascontiguousarray(a).view(np.uint64)
    b64 = np.ascontiguousarray(b).view(np.uint64)
    x = a64[:, None, :] ^ b64[None, :, :]
    return np.bitwise_count(x).sum(axis=2, dtype=np.int64)


def match_descriptors(query: DescriptorSet, train: DescriptorSet, ratio: float = 0.75) -> MatchReport:
    """Nearest-neighbour matching with Lowe's ratio test on Hamming distance.

    Equal distances resolve to the lowest train index. With a single train
    descriptor the second distance counts as 256.
    """
    if not 0 < ratio < 1:
        raise ContractError(f"ratio must lie in (0, 1), got {ratio}")
    if len(query) == 0 or len(train) == 0:
        return MatchReport([], [], 0)
    d = hamming_matrix(query.descriptors, train.descriptors)
    rows = np.arange(len(query))
    nearest = np.argmin(d, axis=1)
    d1 = d[rows, nearest]
    if d.shape[1] > 1:
        masked = d.copy()
        masked[rows, nearest] = np.iinfo(np.int64).max
        d2 = masked.min(axis=1)
    else:
        d2 = np.full(len(query), DESCRIPTOR_BYTES * 8)
    passed = d1 < ratio * d2
    pairs = [(int(i), int(j), int(k)) for i, j, k in zip(rows, nearest, d1)]
    return MatchReport(pairs, [bool(p) for p in passed], int(passed.sum()))
