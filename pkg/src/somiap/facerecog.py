"""Face recognizers over a labeled gallery: Eigenfaces, Fisherfaces and LBPH."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import BoundsError, ContractError, ManifestError
from .imagecore import Rect, as_gray, resize_bilinear
from .numerics import generalized_symmetric_eig, jacobi_eigh

CANONICAL_SIZE = (64, 64)  # (width, height)
LBPH_GRID = (8, 8)
UNKNOWN = "UNKNOWN"
FISHER_REGULARIZATION = 1e-6
AUTO_ILLUMINATION_STD = 25.0
# clockwise from top-left as (dy, dx); the first neighbour is the most significant bit
LBP_NEIGHBORS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


class FaceSample(NamedTuple):
    label: str
    image: np.ndarray


@dataclass(frozen=True)
class Gallery:
    samples: tuple

    def __post_init__(self):
        if not self.samples:
            raise ContractError("gallery needs at least one sample")
        shapes = {np.asarray(s.image).shape for s in self.samples}
        if len(shapes) != 1:
            raise ContractError(f"gallery images differ in size: {sorted(shapes)}")

    @classmethod
    def from_pairs(cls, pairs) -> "Gallery":
        return cls(tuple(FaceSample(str(lbl), as_gray(img)) for lbl, img in pairs))

    @property
    def labels(self) -> list[str]:
        """Distinct labels in first-seen order."""
        return list(dict.fromkeys(s.label for s in self.samples))

    @property
    def sample_labels(self) -> list[str]:
        return [s.label for s in self.samples]

    @property
    def shape(self) -> tuple:
        return np.asarray(self.samples[0].image).shape

    def matrix(self) -> np.ndarray:
        return np.stack([np.asarray(s.image, dtype=np.float64).ravel() for s in self.samples])


class Prediction(NamedTuple):
    label: str
    distance: float
    threshold_applied: float


# --------------------------------------------------------------------------
# preprocessing


def equalize_hist(img: np.ndarray) -> np.ndarray:
    """Cumulative-histogram equalisation, ``round((cdf - cdf_min) / (N - cdf_min) * 255)``."""
    img = as_gray(img)
    hist = np.bincount(img.ravel(), minlength=256)
    cdf = np.cumsum(hist)
    n = img.size
    cdf_min = cdf[np.nonzero(hist)[0][0]]
    if n == cdf_min:
        return img.copy()
    lut = np.floor((cdf - cdf_min) / (n - cdf_min) * 255 + 0.5)
    lut = np.clip(lut, 0, 255).astype(np.uint8)
    return lut[img]


def normalize_face(img: np.ndarray, rect: Rect, size=CANONICAL_SIZE, equalize=True) -> np.ndarray:
    """Crop ``rect``, resize to the canonical size and equalise."""
    img = as_gray(img)
    x, y, w, h = rect
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > img.shape[1] or y + h > img.shape[0]:
        raise BoundsError(f"face rect {tuple(rect)} outside {img.shape[1]}x{img.shape[0]} image")
    face = resize_bilinear(np.ascontiguousarray(img[y : y + h, x : x + w]), size[0], size[1])
    return equalize_hist(face) if equalize else face


# --------------------------------------------------------------------------
# subspace models


def _nearest(distances: np.ndarray) -> int:
    return int(np.argmin(distances))  # first minimum = insertion order


@dataclass(frozen=True, eq=False)
class EigenModel:
    shape: tuple
    mean: np.ndarray
    components: np.ndarray  # (D, k)
    projections: np.ndarray  # (N, k)
    labels: tuple
    cutoff: float = math.inf
    algorithm: str = field(default="eigen", init=False)

    def project(self, vectors: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(vectors) - self.mean) @ self.components


@dataclass(frozen=True, eq=False)
class FisherModel:
    shape: tuple
    mean: np.ndarray
    projection: np.ndarray  # (D, c - 1)
    projections: np.ndarray
    labels: tuple
    cutoff: float = math.inf
    algorithm: str = field(default="fisher", init=False)

    def project(self, vectors: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(vectors) - self.mean) @ self.projection


def _pca_basis(centered: np.ndarray, k: int):
    """Top-``k`` principal directions via the N x N Gram matrix.

    Directions with eigenvalue below a relative tolerance are dropped, so
    fewer than ``k`` columns come back for rank-deficient data.
    """
    n, d = centered.shape
    gram = centered @ centered.T
    dec = jacobi_eigh(gram)
    tol = 1e-10 * max(1.0, float(abs(dec.values[0]))) if n else 0.0
    keep = [i for i in range(min(k, n)) if dec.values[i] > tol]
    if not keep:
        return np.zeros((d, 0)), np.zeros(0)
    vals = dec.values[keep]
    comps = centered.T @ dec.vectors[:, keep] / np.sqrt(vals)
    comps /= np.linalg.norm(comps, axis=0)
    return comps, vals


def fit_eigen(vectors, labels: Sequence[str], k: int | None = None, shape=None) -> EigenModel:
    x = np.asarray(vectors, dtype=np.float64)
    n = len(x)
    if len(labels) != n:
        raise ContractError("labels and vectors must have equal length")
    if k is None:
        k = max(1, n - 1)
    if not 1 <= k <= max(1, n - 1):
        raise ContractError(f"k must lie in [1, {max(1, n - 1)}], got {k}")
    mean = x.mean(axis=0)
    centered = x - mean
    comps, _ = _pca_basis(centered, k)
    return EigenModel(
        shape=tuple(shape) if shape is not None else (x.shape[1],),
        mean=mean,
        components=comps,
        projections=centered @ comps,
        labels=tuple(labels),
    )


def train_eigen(gallery: Gallery, k: int | None = None) -> EigenModel:
    """Eigenfaces: PCA of mean-centred samples, ``k`` defaults to ``N - 1``."""
    return fit_eigen(gallery.matrix(), gallery.sample_labels, k, gallery.shape)


def scatter_matrices(y: np.ndarray, labels: Sequence[str]):
    """Between- and within-class scatter of row vectors ``y``."""
    labels = np.asarray(labels)
    mu = y.mean(axis=0)
    d = y.shape[1]
    sb = np.zeros((d, d))
    sw = np.zeros((d, d))
    for lbl in dict.fromkeys(labels.tolist()):
        cls = y[labels == lbl]
        mc = cls.mean(axis=0)
        diff = (mc - mu)[:, None]
        sb += len(cls) * diff @ diff.T
        dev = cls - mc
        sw += dev.T @ dev
    return sb, sw


def fit_fisher(vectors, labels: Sequence[str], shape=None) -> FisherModel:
    x = np.asarray(vectors, dtype=np.float64)
    n = len(x)
    classes = list(dict.fromkeys(labels))
    c = len(classes)
    if len(labels) != n:
        raise ContractError("labels and vectors must have equal length")
    if c < 2:
        raise ContractError("Fisherfaces need at least two classes")
    if n <= c:
        raise ContractError(f"Fisherfaces need more samples than classes ({n} <= {c})")
    mean = x.mean(axis=0)
    centered = x - mean
    pca, _ = _pca_basis(centered, n - c)
    y = centered @ pca
    sb, sw = scatter_matrices(y, labels)
    dims = min(c - 1, pca.shape[1])
    if dims == 0:
        lda = np.zeros((pca.shape[1], 0))
    else:
        dec = generalized_symmetric_eig(sb, sw, regularization=FISHER_REGULARIZATION)
        lda = dec.vectors[:, :dims]
    proj = pca @ lda
    return FisherModel(
        shape=tuple(shape) if shape is not None else (x.shape[1],),
        mean=mean,
        projection=proj,
        projections=centered @ proj,
        labels=tuple(labels),
    )


def train_fisher(gallery: Gallery) -> FisherModel:
    """Fisherfaces: PCA down to ``N - c`` dimensions, then LDA keeping ``c - 1``."""
    return fit_fisher(gallery.matrix(), gallery.sample_labels, gallery.shape)


# --------------------------------------------------------------------------
# LBPH


def lbp_image(img: np.ndarray) -> np.ndarray:
    """8-neighbour LBP codes; a neighbour sets its bit when it is >= the centre.

    Border pixels are coded 0.
    """
    img = as_gray(img)
    h, w = img.shape
    if h < 3 or w < 3:
        raise ContractError(f"LBP needs at least a 3x3 image, got {w}x{h}")
    center = img[1:-1, 1:-1]
    code = np.zeros(center.shape, dtype=np.uint8)
    for bit, (dy, dx) in enumerate(LBP_NEIGHBORS):
        neigh = img[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]
        code |= (neigh >= center).astype(np.uint8) << (7 - bit)
    out = np.zeros_like(img)
    out[1:-1, 1:-1] = code
    return out


def lbph_histogram(img: np.ndarray, grid=LBPH_GRID) -> np.ndarray:
    img = as_gray(img)
    h, w = img.shape
    gx, gy = grid
    if w % gx or h % gy:
        raise ContractError(f"image {w}x{h} is not divisible by grid {gx}x{gy}")
    codes = lbp_image(img)
    cw, ch = w // gx, h // gy
    cells = codes.reshape(gy, ch, gx, cw).transpose(0, 2, 1, 3).reshape(gy * gx, ch * cw)
    offsets = (np.arange(gy * gx) * 256)[:, None]
    return np.bincount((cells.astype(np.int64) + offsets).ravel(), minlength=gy * gx * 256)


@dataclass(frozen=True, eq=False)
class LbphModel:
    shape: tuple
    grid: tuple
    histograms: np.ndarray  # (N, gx * gy * 256) int64
    labels: tuple
    cutoff: float = math.inf
    algorithm: str = field(default="lbph", init=False)


def train_lbph(gallery: Gallery, grid=LBPH_GRID) -> LbphModel:
    hists = np.stack([lbph_histogram(s.image, grid) for s in gallery.samples])
    return LbphModel(gallery.shape, tuple(grid), hists, tuple(gallery.sample_labels))


def chi_square(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Chi-square distance of ``a`` to each row of ``b``, skipping empty bins."""
    a = np.asarray(a, dtype=np.float64)
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    num = (a - b) ** 2
    den = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return terms.sum(axis=1)


# --------------------------------------------------------------------------
# prediction

FaceModel = Union[EigenModel, FisherModel, LbphModel]


def predict(model: FaceModel, face: np.ndarray, cutoff: float | None = None) -> Prediction:
    """Nearest training sample; ``UNKNOWN`` when its distance exceeds the cutoff."""
    face = np.asarray(face)
    if face.shape != tuple(model.shape):
        raise ContractError(f"face shape {face.shape} does not match model shape {model.shape}")
    limit = model.cutoff if cutoff is None else cutoff
    if isinstance(model, LbphModel):
        dists = chi_square(lbph_histogram(face, model.grid), model.histograms)
    else:
        q = model.project(face.astype(np.float64).ravel())[0]
        dists = np.linalg.norm(model.projections - q, axis=1)
    i = _nearest(dists)
    dist = float(dists[i])
    label = model.labels[i] if dist <= limit else UNKNOWN
    return Prediction(label, dist, float(limit))


def class_illumination_spread(gallery: Gallery) -> float:
    """Largest per-class standard deviation of sample mean intensities."""
    means = {}
    for s in gallery.samples:
        means.setdefault(s.label, []).append(float(np.mean(s.image)))
    return max(float(np.std(v)) for v in means.values())


def select_recognizer(policy: str, gallery: Gallery | None = None,
                      illumination_std: float = AUTO_ILLUMINATION_STD) -> str:
    """Resolve ``eigen|fisher|lbph|auto``.

    ``auto`` picks Fisherfaces when illumination varies strongly within a
    class and LBPH otherwise.
    """
    if policy in ("eigen", "fisher", "lbph"):
        return policy
    if policy != "auto":
        raise ContractError(f"unknown recognizer policy {policy!r}")
    if gallery is None:
        raise ContractError("auto policy needs a gallery")
    return "fisher" if class_illumination_spread(gallery) > illumination_std else "lbph"


def train(gallery: Gallery, policy: str = "lbph", **options) -> FaceModel:
    algo = select_recognizer(policy, gallery, options.pop("illumination_std", AUTO_ILLUMINATION_STD))
    if algo == "eigen":
        return train_eigen(gallery, options.get("k"))
    if algo == "fisher":
        return train_fisher(gallery)
    return train_lbph(gallery, options.get("grid", LBPH_GRID))


# --------------------------------------------------------------------------
# serialisation


def _floats(a: np.ndarray) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def model_to_dict(model: FaceModel) -> dict:
    cutoff = None if math.isinf(model.cutoff) else model.cutoff
    out = {"algorithm": model.algorithm, "shape": list(model.shape),
           "labels": list(model.labels), "cutoff": cutoff}
    if isinstance(model, LbphModel):
        out["grid"] = list(model.grid)
        out["histograms"] = model.histograms.tolist()
        return out
    out["mean"] = _floats(model.mean)
    basis = model.components if isinstance(model, EigenModel) else model.projection
    out["basis"] = _floats(basis.T)  # one row per column vector
    out["basis_rows"] = int(basis.shape[0])
    out["projections"] = _floats(model.projections)
    return out


def model_from_dict(data: dict) -> FaceModel:
    algo = data.get("algorithm")
    shape = tuple(data["shape"])
    labels = tuple(data["labels"])
    cutoff = math.inf if data.get("cutoff") is None else float(data["cutoff"])
    if algo == "lbph":
        hist = np.array(data["histograms"], dtype=np.int64).reshape(len(labels), -1)
        return LbphModel(shape, tuple(data["grid"]), hist, labels, cutoff)
    if algo not in ("eigen", "fisher"):
        raise ManifestError(f"unknown face model algorithm {algo!r}")
    mean = np.array(data["mean"], dtype=np.float64)
    basis = np.ascontiguousarray(
        np.array(data["basis"], dtype=np.float64).reshape(-1, data["basis_rows"]).T)
    proj = np.array(data["projections"], dtype=np.float64).reshape(len(labels), basis.shape[1])
    cls = EigenModel if algo == "eigen" else FisherModel
    return cls(shape, mean, basis, proj, labels, cutoff)
