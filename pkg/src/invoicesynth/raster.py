"""Raster primitives: 8-bit RGB page images, binary masks, PNG I/O.

Images are numpy arrays of shape (height, width, 3), dtype uint8; masks
are (height, width) uint8 holding only {0, 255} (0 = keep, 255 = inpaint).
PNG is used for all reads and writes so golden tests stay lossless.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image

from .layout import BBox

__all__ = [
    "RasterError",
    "load_image",
    "save_image",
    "save_mask",
    "check_image",
    "check_mask",
    "build_mask",
]

MASK_KEEP = 0
MASK_INPAINT = 255


class RasterError(ValueError):
    """Raised for malformed images/masks or incompatible dimensions."""


def check_image(image: np.ndarray) -> np.ndarray:
    if not (isinstance(image, np.ndarray) and image.ndim == 3 and image.shape[2] == 3):
        raise RasterError(f"expected (h, w, 3) RGB array, got shape {getattr(image, 'shape', None)}")
    if image.dtype != np.uint8:
        raise RasterError(f"expected uint8 image, got {image.dtype}")
    return image


def check_mask(mask: np.ndarray, image: np.ndarray | None = None) -> np.ndarray:
    if not (isinstance(mask, np.ndarray) and mask.ndim == 2):
        raise RasterError(f"expected (h, w) mask array, got shape {getattr(mask, 'shape', None)}")
    if mask.dtype != np.uint8:
        raise RasterError(f"expected uint8 mask, got {mask.dtype}")
    bad = np.setdiff1d(np.unique(mask), [MASK_KEEP, MASK_INPAINT])
    if bad.size:
        raise RasterError(f"mask contains non-binary values {bad.tolist()}")
    if image is not None and mask.shape != image.shape[:2]:
        raise RasterError(
            f"mask shape {mask.shape} does not match image shape {image.shape[:2]}"
        )
    return mask


def load_image(path: str | Path) -> np.ndarray:
    """Load any PIL-readable image as 8-bit RGB."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_image(image: np.ndarray, path: str | Path) -> None:
    """Write an RGB array as PNG (lossless, deterministic encoder settings)."""
    check_image(image)
    Image.fromarray(image, mode="RGB").save(path, format="PNG", compress_level=6)


def save_mask(mask: np.ndarray, path: str | Path) -> None:
    check_mask(mask)
    Image.fromarray(mask, mode="L").save(path, format="PNG", compress_level=6)


def build_mask(width: int, height: int, boxes: list[BBox], pad: int = 0) -> np.ndarray:
    """Binary mask covering the integer pixel cover of each box, dilated by
    pad pixels and clipped to the page; overlapping boxes union.

    A pixel (px, py) is masked iff floor(x_min)-pad <= px <= ceil(x_max)+pad
    and likewise in y.
    """
    if width <= 0 or height <= 0:
        raise RasterError(f"page dimensions must be positive, got {width}x{height}")
    if pad < 0:
        raise RasterError("pad must be non-negative")
    mask = np.zeros((height, width), dtype=np.uint8)
    for box in boxes:
        x0 = math.floor(box.x_min) - pad
        y0 = math.floor(box.y_min) - pad
        x1 = math.ceil(box.x_max) + pad
        y1 = math.ceil(box.y_max) + pad
        if x1 < 0 or y1 < 0 or x0 >= width or y0 >= height:
            raise RasterError(f"box {box.as_tuple()} does not intersect the page")
        x0, y0 = max(x0, 0), max(y0, 0)
        x1, y1 = min(x1, width - 1), min(y1, height - 1)
        mask[y0 : y1 + 1, x0 : x1 + 1] = MASK_INPAINT
    return mask
