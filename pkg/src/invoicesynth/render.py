"""Dynamic font sizing and centered rendering into bounding boxes.

The size search starts from the largest size whose line height fits the
box height and shrinks until the measured advance width is strictly less
than the box width. Rendering blends anti-aliased glyph coverage over the
page, clipped to the box plus a 1 px anti-aliasing allowance, so pixels
beyond that are untouched by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from .fonts import FontFace, FontSpec
from .layout import BBox
from .raster import check_image

__all__ = [
    "CannotFitError",
    "RenderedFragment",
    "fit_font_size",
    "render_fragment",
    "estimate_text_color",
]


class CannotFitError(ValueError):
    """The text cannot satisfy both box constraints even at min_size."""

    def __init__(self, text: str, box: BBox, reason: str):
        super().__init__(f"cannot fit {text!r} in box {box.as_tuple()}: {reason}")
        self.text = text
        self.box = box
        self.reason = reason


@dataclass(frozen=True)
class RenderedFragment:
    fragment_id: str
    text: str
    size: int
    draw_origin: tuple[float, float]  # (x, baseline y)
    ink_bbox: BBox | None  # None when the text produced no visible ink


def fit_font_size(text: str, box: BBox, font: FontSpec) -> int:
    """Largest size whose line height fits the box height, shrunk by
    size_step until the advance width is strictly below the box width.

    Raises CannotFitError when even min_size cannot satisfy either
    constraint; the caller decides whether to fall back to min_size.
    """
    if not text:
        raise CannotFitError(text, box, "empty text")
    face = font.face()

    size = max(int(box.height * face.upm // face.line_height_units()), 0)
    while face.line_height(size + 1) <= box.height:
        size += 1
    while size >= 1 and face.line_height(size) > box.height:
        size -= 1
    if size < font.min_size:
        raise CannotFitError(
            text, box, f"box height {box.height} admits no size >= min_size {font.min_size}"
        )

    while face.advance(text, size) >= box.width:
        size -= font.size_step
        if size < font.min_size:
            raise CannotFitError(
                text, box, f"advance width exceeds box width even at min_size {font.min_size}"
            )
    return size


def render_fragment(
    image: np.ndarray,
    box: BBox,
    text: str,
    font: FontSpec,
    size: int,
    color: tuple[int, int, int],
    fragment_id: str = "",
) -> tuple[np.ndarray, RenderedFragment]:
    """Draw text centered in the box onto a copy of the image.

    The horizontal origin puts the advance width symmetric about the box
    x-center; vertically the (ascent+descent) band is centered with the
    baseline at center + ascent - line_height/2. Output pixels outside the
    box expanded by 1 px equal the input exactly.
    """
    check_image(image)
    face: FontFace = font.face()
    height, width = image.shape[:2]

    advance = face.advance(text, size)
    line_height = face.line_height(size)
    ascent = face.ascent(size)
    center_x = (box.x_min + box.x_max) / 2
    center_y = (box.y_min + box.y_max) / 2
    origin_x = center_x - advance / 2
    baseline_y = center_y + ascent - line_height / 2

    # Clip region: the box plus the 1 px anti-aliasing allowance.
    x0 = max(math.floor(box.x_min) - 1, 0)
    y0 = max(math.floor(box.y_min) - 1, 0)
    x1 = min(math.ceil(box.x_max) + 1, width - 1)
    y1 = min(math.ceil(box.y_max) + 1, height - 1)

    canvas = Image.new("L", (x1 - x0 + 1, y1 - y0 + 1), 0)
    draw = ImageDraw.Draw(canvas)
    draw.text(
        (origin_x - x0, baseline_y - y0),
        text,
        font=face.pil_font(size),
        fill=255,
        anchor="ls",
    )
    alpha = np.asarray(canvas, dtype=np.float64) / 255.0

    out = image.copy()
    region = out[y0 : y1 + 1, x0 : x1 + 1].astype(np.float64)
    rgb = np.array(color, dtype=np.float64)
    blended = region * (1.0 - alpha[..., None]) + rgb * alpha[..., None]
    out[y0 : y1 + 1, x0 : x1 + 1] = np.rint(blended).astype(np.uint8)

    ys, xs = np.nonzero(alpha)
    if ys.size:
        ink = BBox(
            float(x0 + xs.min()),
            float(y0 + ys.min()),
            float(x0 + xs.max() + 1),
            float(y0 + ys.max() + 1),
        )
    else:
        ink = None
    return out, RenderedFragment(
        fragment_id=fragment_id,
        text=text,
        size=size,
        draw_origin=(origin_x, baseline_y),
        ink_bbox=ink,
    )


def estimate_text_color(original: np.ndarray, box: BBox) -> tuple[int, int, int]:
    """Mean color of the darkest-quartile pixels inside the box of the
    pre-inpaint image: an estimate of the original ink color.

    Falls back to black when the box covers fewer than 16 pixels.
    """
    check_image(original)
    height, width = original.shape[:2]
    x0 = max(math.floor(box.x_min), 0)
    y0 = max(math.floor(box.y_min), 0)
    x1 = min(math.ceil(box.x_max), width - 1)
    y1 = min(math.ceil(box.y_max), height - 1)
    if x1 < x0 or y1 < y0:
        return (0, 0, 0)
    pixels = original[y0 : y1 + 1, x0 : x1 + 1].reshape(-1, 3).astype(np.float64)
    if pixels.shape[0] < 16:
        return (0, 0, 0)
    luminance = pixels @ np.array([0.299, 0.587, 0.114])
    threshold = np.quantile(luminance, 0.25)
    darkest = pixels[luminance <= threshold]
    mean = np.rint(darkest.mean(axis=0)).astype(int)
    return (int(mean[0]), int(mean[1]), int(mean[2]))
