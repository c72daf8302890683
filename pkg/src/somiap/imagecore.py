"""Image substrate: decoding, gray conversion, resizing and integral images.

Images are plain numpy arrays. A color image is ``(height, width, 3)`` uint8
in RGB order, a gray image is ``(height, width)`` uint8.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BoundsError, ContractError, DecodeError

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
JPEG_MAGIC = b"\xff\xd8"


class Rect(NamedTuple):
    x: int
    y: int
    w: int
    h: int


def as_color(img) -> np.ndarray:
    """Validate and return a ``(h, w, 3)`` uint8 array."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ContractError(f"color image must have shape (h, w, 3), got {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractError("color image must be at least 1x1")
    if arr.dtype != np.uint8:
        raise ContractError(f"color image must be uint8, got {arr.dtype}")
    return arr


def as_gray(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ContractError(f"gray image must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ContractError("gray image must be at least 1x1")
    if arr.dtype != np.uint8:
        raise ContractError(f"gray image must be uint8, got {arr.dtype}")
    return arr


# --------------------------------------------------------------------------
# decoding


def _pnm_tokens(data: bytes, count: int):
    """Read ``count`` whitespace separated header tokens after the magic."""
    pos = 2
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise DecodeError("pnm header: unexpected end of header")
        tok = data[start:pos]
        if not tok.isdigit():
            raise DecodeError(f"pnm header: invalid token {tok!r}")
        tokens.append(int(tok))
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not data[pos : pos + 1].isspace():
        raise DecodeError("pnm header: missing separator before raster")
    return tokens, pos + 1


def _decode_pnm(data: bytes) -> np.ndarray:
    channels = 3 if data[:2] == b"P6" else 1
    (width, height, maxval), offset = _pnm_tokens(data, 3)
    if width < 1 or height < 1:
        raise DecodeError("pnm header: zero image dimension")
    if not 1 <= maxval <= 255:
        raise DecodeError(f"pnm header: unsupported maxval {maxval}")
    need = width * height * channels
    raster = data[offset : offset + need]
    if len(raster) < need:
        raise DecodeError(f"pnm raster: truncated, expected {need} bytes, got {len(raster)}")
    arr = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)
    if maxval != 255:
        if arr.max() > maxval:
            raise DecodeError("pnm raster: sample exceeds maxval")
        arr = ((arr.astype(np.uint32) * 255 + maxval // 2) // maxval).astype(np.uint8)
    if channels == 1:
        arr = np.repeat(arr, 3, axis=2)
    return np.ascontiguousarray(arr)


def _decode_pillow(data: bytes, fmt: str) -> np.ndarray:
    from PIL import Image

    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            im = im.convert("RGB")
            return np.array(im, dtype=np.uint8)
    except Exception as exc:  # Pillow raises a zoo of exception types
        raise DecodeError(f"{fmt} decode: {exc}") from exc


def decode_image(data: bytes) -> np.ndarray:
    """Decode a PNG, JPEG, binary PPM (P6) or PGM (P5) stream into RGB."""
    if data[:2] in (b"P5", b"P6"):
        return _decode_pnm(data)
    if data[:8] == PNG_MAGIC:
        return _decode_pillow(data, "png")
    if data[:2] == JPEG_MAGIC:
        return _decode_pillow(data, "jpeg")
    raise DecodeError("signature: unrecognised image format")


def read_image(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_ppm(img: np.ndarray) -> bytes:
    img = as_color(img)
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def encode_pgm(img: np.ndarray) -> bytes:
    img = as_gray(img)
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + img.tobytes()


def encode_png(img: np.ndarray) -> bytes:
    from PIL import Image

    buf = io.BytesIO()
    Image.fromarray(np.asarray(img)).save(buf, format="PNG")
    return buf.getvalue()


def write_image(path, img: np.ndarray) -> None:
    path = str(path)
    if path.endswith(".ppm"):
        payload = encode_ppm(img)
    elif path.endswith(".pgm"):
        payload = encode_pgm(img)
    else:
        payload = encode_png(img)
    with open(path, "wb") as fh:
        fh.write(payload)


# --------------------------------------------------------------------------
# pixel operations


def to_gray(img: np.ndarray) -> np.ndarray:
    """BT.601 luma, rounded half up. Integer arithmetic keeps it exact."""
    img = as_color(img).astype(np.uint32)
    y = (299 * img[..., 0] + 587 * img[..., 1] + 114 * img[..., 2] + 500) // 1000
    return np.minimum(y, 255).astype(np.uint8)


def _axis_weights(src: int, dst: int):
    scale = src / dst
    coord = (np.arange(dst, dtype=np.float64) + 0.5) * scale - 0.5
    coord = np.clip(coord, 0.0, src - 1)
    lo = np.floor(coord).astype(np.intp)
    hi = np.minimum(lo + 1, src - 1)
    frac = coord - lo
    return lo, hi, frac


def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize with pixel-center alignment and edge clamping.

    Output pixel ``i`` samples source coordinate ``(i + 0.5) * src / dst - 0.5``.
    """
    img = as_gray(img)
    if out_w < 1 or out_h < 1:
        raise ContractError(f"target size must be positive, got {out_w}x{out_h}")
    h, w = img.shape
    if (w, h) == (out_w, out_h):
        return img.copy()
    x0, x1, fx = _axis_weights(w, out_w)
    y0, y1, fy = _axis_weights(h, out_h)
    # gather the sampled rows first so the cost follows the output size
    r0 = img[y0].astype(np.float64)
    r1 = img[y1].astype(np.float64)
    top = r0[:, x0] * (1 - fx) + r0[:, x1] * fx
    bottom = r1[:, x0] * (1 - fx) + r1[:, x1] * fx
    out = top * (1 - fy)[:, None] + bottom * fy[:, None]
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


# --------------------------------------------------------------------------
# integral images


@dataclass(frozen=True)
class IntegralImage:
    """Cumulative tables of shape ``(h + 1, w + 1)``; row and column 0 are zero."""

    sums: np.ndarray
    squared_sums: np.ndarray

    @property
    def width(self) -> int:
        return self.sums.shape[1] - 1

    @property
    def height(self) -> int:
        return self.sums.shape[0] - 1


def integral(img: np.ndarray) -> IntegralImage:
    img = as_gray(img).astype(np.int64)
    h, w = img.shape
    sums = np.zeros((h + 1, w + 1), dtype=np.int64)
    sq = np.zeros((h + 1, w + 1), dtype=np.int64)
    sums[1:, 1:] = img.cumsum(0).cumsum(1)
    sq[1:, 1:] = (img * img).cumsum(0).cumsum(1)
    return IntegralImage(sums, sq)


def _check_rect(ii: IntegralImage, r: Rect) -> None:
    x, y, w, h = r
    if w < 1 or h < 1:
        raise ContractError(f"rect must have positive extent, got {tuple(r)}")
    if x < 0 or y < 0 or x + w > ii.width or y + h > ii.height:
        raise BoundsError(f"rect {tuple(r)} outside {ii.width}x{ii.height} image")


def rect_sum(ii: IntegralImage, r: Rect) -> int:
    _check_rect(ii, r)
    x, y, w, h = r
    s = ii.sums
    return int(s[y + h, x + w] - s[y, x + w] - s[y + h, x] + s[y, x])


def rect_sq_sum(ii: IntegralImage, r: Rect) -> int:
    _check_rect(ii, r)
    x, y, w, h = r
    s = ii.squared_sums
    return int(s[y + h, x + w] - s[y, x + w] - s[y + h, x] + s[y, x])
