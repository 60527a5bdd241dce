"""Normalized RGB images: file I/O, box downsampling and distances.

An image is a C-contiguous ``float64`` array of shape ``(H, W, 3)`` with
values in [0, 1], channel order R, G, B. Images are treated as immutable
values; every function here returns a new array.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from . import kernels


class ImageError(Exception):
    """Base class for image-level failures."""


class ImageIOError(ImageError, OSError):
    """The file could not be opened or read."""


class ImageFormatError(ImageError, ValueError):
    """The file is not a supported or well-formed 8-bit RGB image."""


class EmptyImageError(ImageError, ValueError):
    """The image has a zero dimension."""


class DimensionMismatchError(ImageError, ValueError):
    """Two images that must match in shape do not."""


def as_image(data) -> np.ndarray:
    """Validate ``data`` as an image and return it as contiguous float64."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ImageFormatError(f"expected an H x W x 3 array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyImageError(f"image has zero dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ImageFormatError("image contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ImageFormatError("image values must lie in [0, 1]")
    return arr


def check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")


def clamp01(v: float) -> float:
    return min(1.0, max(0.0, v))


# --------------------------------------------------------------------------
# File I/O
# --------------------------------------------------------------------------

def _read_ppm(raw: bytes) -> np.ndarray:
    # binary P6 with maxval 255; header comments allowed
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PPM header")
        tokens.append(raw[start:pos])
    pos += 1  # single whitespace byte before the raster
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ImageFormatError("malformed PPM header") from None
    if maxval != 255:
        raise ImageFormatError(f"only 8-bit PPM is supported (maxval {maxval})")
    if width == 0 or height == 0:
        raise EmptyImageError("PPM has zero dimension")
    need = width * height * 3
    body = raw[pos:pos + need]
    if len(body) != need:
        raise ImageFormatError(f"truncated PPM raster ({len(body)} of {need} bytes)")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)


def _write_ppm(pixels: np.ndarray, path) -> None:
    h, w, _ = pixels.shape
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(pixels.tobytes())


def _read_pil(path) -> np.ndarray:
    try:
        with PILImage.open(path) as im:
            im.load()
            if im.width == 0 or im.height == 0:
                raise EmptyImageError("image has zero dimension")
            if im.mode not in ("RGB", "RGBA", "L", "LA", "P", "PA"):
                raise ImageFormatError(f"unsupported pixel mode {im.mode!r} (need 8-bit RGB)")
            return np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, SyntaxError) as exc:
        raise ImageFormatError(f"{path}: {exc}") from exc
    except OSError as exc:
        # PIL reports truncated or corrupt streams as OSError
        raise ImageFormatError(f"{path}: {exc}") from exc


def load_image(path) -> np.ndarray:
    """Read an 8-bit PNG or binary PPM; each channel value v becomes v / 255."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ImageIOError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise ImageFormatError(f"{path}: empty file")
    if raw[:2] == b"P6":
        pixels = _read_ppm(raw)
    else:
        pixels = _read_pil(path)
    if pixels.shape[0] == 0 or pixels.shape[1] == 0:
        raise EmptyImageError(f"{path}: zero dimension")
    return np.ascontiguousarray(pixels, dtype=np.float64) / 255.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    # round half up
    return np.clip(np.floor(np.asarray(img) * 255.0 + 0.5), 0, 255).astype(np.uint8)


def save_image(img: np.ndarray, path) -> None:
    """Write ``img`` as 8-bit PNG (or PPM if the suffix is .ppm)."""
    img = as_image(img)
    pixels = to_uint8(img)
    path = Path(path)
    try:
        if path.suffix.lower() in (".ppm", ".pnm"):
            _write_ppm(pixels, path)
        else:
            PILImage.fromarray(pixels, mode="RGB").save(path, format="PNG")
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


# --------------------------------------------------------------------------
# Geometry and distances
# --------------------------------------------------------------------------

def _box_edges(n_in: int, n_out: int) -> np.ndarray:
    # base box size n_in // n_out; the remainder goes to the trailing boxes
    base, rem = divmod(n_in, n_out)
    sizes = np.full(n_out, base)
    if rem:
        sizes[n_out - rem:] += 1
    return np.concatenate(([0], np.cumsum(sizes)))


def resize_box(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Downsample by unweighted box averaging over a partition of rows/cols."""
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be positive")
    if out_h > h or out_w > w:
        raise ValueError(f"resize_box only downsamples ({h}x{w} -> {out_h}x{out_w})")
    rows = _box_edges(h, out_h)
    cols = _box_edges(w, out_w)
    # sums over row boxes then column boxes
    rsum = np.add.reduceat(img, rows[:-1], axis=0)
    bsum = np.add.reduceat(rsum, cols[:-1], axis=1)
    counts = np.outer(np.diff(rows), np.diff(cols))[:, :, None]
    out = bsum / counts
    # means of values in [0, 1] can drift by an ulp past the bounds
    np.clip(out, 0.0, 1.0, out=out)
    return np.ascontiguousarray(out)


def distance(a: np.ndarray, b: np.ndarray, normalized: bool = False) -> float:
    """Euclidean norm of ``a - b`` over all entries.

    With ``normalized=True`` the result is divided by sqrt(H*W*3), i.e. the
    root-mean-square difference, which is comparable across resolutions.
    """
    check_same_shape(a, b)
    d = kernels.distance(a, b)
    if normalized:
        d /= float(np.sqrt(a.size))
    return d
