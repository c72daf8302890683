"""Perceptual hashes (dhash, pHash) in gray and per-channel color variants,
Hamming comparison, and threshold calibration over labeled pairs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ContractError
from .imagecore import as_color, as_gray, resize_bilinear, to_gray
from .numerics import dct2


class HashAlgo(str, enum.Enum):
    DHASH_GRAY = "dhash_gray"
    DHASH_COLOR = "dhash_color"
    PHASH_GRAY = "phash_gray"
    PHASH_COLOR = "phash_color"

    @property
    def bit_width(self) -> int:
        return 192 if self.is_color else 64

    @property
    def is_color(self) -> bool:
        return self.value.endswith("_color")

    @property
    def base(self) -> str:
        return self.value.split("_")[0]


# Operating thresholds from the reference experiments (dhash gray/color,
# pHash gray/color).
DEFAULT_THRESHOLDS = {
    HashAlgo.DHASH_GRAY: 34,
    HashAlgo.DHASH_COLOR: 36,
    HashAlgo.PHASH_GRAY: 23,
    HashAlgo.PHASH_COLOR: 23,
}


@dataclass(frozen=True)
class HashDigest:
    algo: HashAlgo
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.algo.bit_width):
            raise ContractError(f"bits do not fit {self.algo.value} width")

    @property
    def width(self) -> int:
        return self.algo.bit_width

    def bit(self, i: int) -> int:
        """Bit ``i`` counted from the most significant end."""
        return (self.bits >> (self.width - 1 - i)) & 1

    def to_hex(self) -> str:
        return f"{self.bits:0{self.width // 4}x}"

    def __str__(self) -> str:
        return f"{self.algo.value}:{self.to_hex()}"

    @classmethod
    def parse(cls, text: str) -> "HashDigest":
        tag, _, hexstr = text.partition(":")
        try:
            algo = HashAlgo(tag)
        except ValueError:
            raise ContractError(f"unknown hash algorithm tag {tag!r}") from None
        if len(hexstr) != algo.bit_width // 4:
            raise ContractError(f"{tag} digest needs {algo.bit_width // 4} hex chars")
        return cls(algo, int(hexstr, 16))


def pack_bits(flags) -> int:
    """Pack booleans MSB-first, in row-major order."""
    flat = np.asarray(flags, dtype=bool).ravel()
    pad = (-flat.size) % 8
    return int.from_bytes(np.packbits(flat).tobytes(), "big") >> pad


def _dhash_bits(gray: np.ndarray) -> int:
    small = resize_bilinear(gray, 9, 8).astype(np.int16)
    return pack_bits(small[:, 1:] > small[:, :-1])


def _phash_bits(gray: np.ndarray) -> int:
    small = resize_bilinear(gray, 32, 32)
    low = dct2(small)[:8, :8]
    ac_mean = (low.sum() - low[0, 0]) / 63.0
    return pack_bits(low > ac_mean)


_BASES: dict[str, Callable[[np.ndarray], int]] = {"dhash": _dhash_bits, "phash": _phash_bits}


def dhash_gray(img: np.ndarray) -> HashDigest:
    """64-bit horizontal-gradient hash: bit set where the right neighbour is brighter."""
    return HashDigest(HashAlgo.DHASH_GRAY, _dhash_bits(as_gray(img)))


def phash_gray(img: np.ndarray) -> HashDigest:
    """64-bit DCT hash over the 8x8 low-frequency block of a 32x32 downsample.

    Each bit compares a coefficient against the mean of the 63 AC terms.
    """
    return HashDigest(HashAlgo.PHASH_GRAY, _phash_bits(as_gray(img)))


def color_hash(img: np.ndarray, base: str) -> HashDigest:
    """Hash each RGB plane separately and concatenate as R | G | B (192 bits)."""
    img = as_color(img)
    try:
        fn = _BASES[base]
    except KeyError:
        raise ContractError(f"unknown base hash {base!r}") from None
    bits = 0
    for ch in range(3):
        bits = (bits << 64) | fn(img[..., ch])
    return HashDigest(HashAlgo(f"{base}_color"), bits)


def compute_hash(img: np.ndarray, algo: HashAlgo | str) -> HashDigest:
    """Hash a color image with any algorithm (gray variants convert first)."""
    algo = HashAlgo(algo)
    if algo.is_color:
        return color_hash(img, algo.base)
    gray = img if np.asarray(img).ndim == 2 else to_gray(img)
    return dhash_gray(gray) if algo.base == "dhash" else phash_gray(gray)


def hamming(a: HashDigest, b: HashDigest) -> int:
    if a.algo != b.algo:
        raise ContractError(f"cannot compare {a.algo.value} with {b.algo.value}")
    return (a.bits ^ b.bits).bit_count()


# --------------------------------------------------------------------------
# calibration


@dataclass(frozen=True)
class CalibrationReport:
    algo: HashAlgo
    weight_similar: float
    weight_different: float
    threshold: int
    accuracy: float
    n_similar: int = 0
    n_different: int = 0


def sweep_threshold(similar: Sequence[int], different: Sequence[int], width: int):
    """Return ``(threshold, accuracy)`` maximising accuracy of ``d <= T``.

    Ties go to the smallest threshold.
    """
    if not similar or not different:
        raise ContractError("calibration needs non-empty similar and different sets")
    sim = np.bincount(np.asarray(similar, dtype=np.int64), minlength=width + 1)[: width + 1]
    diff = np.bincount(np.asarray(different, dtype=np.int64), minlength=width + 1)[: width + 1]
    total = len(similar) + len(different)
    # correct(T) = #similar with d <= T + #different with d > T
    correct = np.cumsum(sim) + (len(different) - np.cumsum(diff))
    best = int(np.argmax(correct))
    return best, float(correct[best]) / total


def calibrate_distances(
    similar: Sequence[int], different: Sequence[int], algo: HashAlgo | str
) -> CalibrationReport:
    algo = HashAlgo(algo)
    similar, different = list(similar), list(different)
    width = algo.bit_width
    if any(d < 0 or d > width for d in similar + different):
        raise ContractError(f"distances must lie in [0, {width}]")
    threshold, accuracy = sweep_threshold(similar, different, width)
    return CalibrationReport(
        algo=algo,
        weight_similar=float(np.mean(similar)),
        weight_different=float(np.mean(different)),
        threshold=threshold,
        accuracy=accuracy,
        n_similar=len(similar),
        n_different=len(different),
    )


def calibrate(
    similar: Iterable[tuple[np.ndarray, np.ndarray]],
    different: Iterable[tuple[np.ndarray, np.ndarray]],
    algo: HashAlgo | str,
) -> CalibrationReport:
    """Calibrate a threshold from pairs of color images."""
    algo = HashAlgo(algo)

    def distances(pairs):
        return [hamming(compute_hash(a, algo), compute_hash(b, algo)) for a, b in pairs]

    return calibrate_distances(distances(similar), distances(different), algo)
