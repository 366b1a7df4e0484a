"""OCR engine abstraction and the two shipped implementations.

An engine turns a page image into text runs: recognized string, location,
confidence. DoctrEngine wraps the python-doctr predictor when that package
is installed. TemplateEngine is a self-contained classical fallback
(threshold, connected components, glyph template matching) that needs no
model weights, so the adapter works in fully offline environments.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from scipy import ndimage

__all__ = ["EngineRun", "EngineError", "DoctrEngine", "TemplateEngine", "default_engine"]

GRANULARITIES = ("line", "word")


class EngineError(RuntimeError):
    """The OCR engine is unavailable or failed on this image."""


@dataclass(frozen=True)
class EngineRun:
    """One detected text run in engine-native coordinates.

    quad is four (x, y) corners; normalized marks whether they are
    fractions of the page size (doctr convention) or absolute pixels.
    """

    text: str
    quad: tuple[tuple[float, float], ...]
    confidence: float
    normalized: bool

    def __post_init__(self):
        if len(self.quad) != 4:
            raise EngineError(f"quad must have 4 corners, got {len(self.quad)}")
        if not all(np.isfinite(c) for point in self.quad for c in point):
            raise EngineError(f"non-finite coordinate in quad {self.quad}")
        if not (0.0 <= self.confidence <= 1.0):
            raise EngineError(f"confidence {self.confidence} outside [0, 1]")


class DoctrEngine:
    """python-doctr predictor behind the EngineRun interface."""

    name = "doctr"

    def __init__(self):
        try:
            from doctr.models import ocr_predictor
        except ImportError as exc:
            raise EngineError(
                "python-doctr is not installed; install the [doctr] extra "
                "or use the builtin template engine"
            ) from exc
        self._predictor = ocr_predictor(pretrained=True)

    def run(self, image: np.ndarray, granularity: str = "line") -> list[EngineRun]:
        result = self._predictor([image])
        runs = []
        for block in result.pages[0].blocks:
            for line in block.lines:
                if granularity == "word":
                    items = [(w.value, w.geometry, w.confidence) for w in line.words]
                else:
                    text = " ".join(w.value for w in line.words)
                    confidence = min((w.confidence for w in line.words), default=0.0)
                    items = [(text, line.geometry, confidence)]
                for text, geometry, confidence in items:
                    (x0, y0), (x1, y1) = geometry
                    runs.append(
                        EngineRun(
                            text=text,
                            quad=((x0, y0), (x1, y0), (x1, y1), (x0, y1)),
                            confidence=float(confidence),
                            normalized=True,
                        )
                    )
        return runs


# Classical fallback engine -------------------------------------------------

_CHARSET = string.ascii_letters + string.digits + ".,:;!?#&@%$()[]/-+*'\"_="
# Ratios of ink height to font size for the three common glyph height
# classes in a Latin text line, used to propose candidate font sizes.
_HEIGHT_RATIOS = (0.729, 0.76, 0.52)


def _bundled_font() -> Path:
    return Path(__file__).resolve().parent / "assets" / "DejaVuSans.ttf"


def _otsu_threshold(gray: np.ndarray) -> int:
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total
    mu = np.cumsum(hist * np.arange(256)) / total
    mu_t = mu[-1]
    denom = omega * (1 - omega)
    denom[denom == 0] = np.nan
    sigma_b = (mu_t * omega - mu) ** 2 / denom
    if np.all(np.isnan(sigma_b)):
        return 0  # uniform image, nothing separable
    return int(np.nanargmax(sigma_b))


@dataclass(frozen=True)
class _Component:
    x0: int
    y0: int
    x1: int  # exclusive
    y1: int  # exclusive
    bitmap: np.ndarray

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0


@lru_cache(maxsize=32)
def _templates(font_path: str, size: int) -> dict[str, np.ndarray]:
    """Binarized, ink-cropped glyph bitmaps for one font size."""
    font = ImageFont.truetype(font_path, size)
    templates = {}
    for char in _CHARSET:
        canvas = Image.new("L", (size * 3, size * 3), 0)
        ImageDraw.Draw(canvas).text((size, size), char, font=font, fill=255)
        arr = np.asarray(canvas) > 127
        ys, xs = np.nonzero(arr)
        if ys.size == 0:
            continue
        templates[char] = arr[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    return templates


def _match_score(bitmap: np.ndarray, template: np.ndarray) -> float:
    """Overlap score in [0, 1] after padding both to a common canvas."""
    if abs(bitmap.shape[0] - template.shape[0]) > 2 or abs(bitmap.shape[1] - template.shape[1]) > 2:
        return 0.0
    h = max(bitmap.shape[0], template.shape[0])
    w = max(bitmap.shape[1], template.shape[1])
    a = np.zeros((h, w), dtype=bool)
    b = np.zeros((h, w), dtype=bool)
    a[: bitmap.shape[0], : bitmap.shape[1]] = bitmap
    b[: template.shape[0], : template.shape[1]] = template
    union = (a | b).sum()
    if union == 0:
        return 0.0
    return float((a & b).sum() / union)


class TemplateEngine:
    """Offline detector/recognizer matching glyphs against a known font.

    Detection is plain connected-component analysis; recognition compares
    each glyph cluster against rasterized templates at a per-line size
    estimate. Built for machine-printed pages in (or close to) the
    template font; it makes no attempt at scanned or handwritten input.
    """

    name = "template"

    def __init__(self, font_path: str | Path | None = None):
        self.font_path = str(font_path) if font_path else str(_bundled_font())
        if not Path(self.font_path).exists():
            raise EngineError(f"template font {self.font_path} not found")

    def run(self, image: np.ndarray, granularity: str = "line") -> list[EngineRun]:
        if granularity not in GRANULARITIES:
            raise EngineError(f"unknown granularity {granularity!r}")
        if image.ndim == 3:
            gray = np.round(image @ np.array([0.299, 0.587, 0.114])).astype(np.uint8)
        else:
            gray = image.astype(np.uint8)
        ink = gray < _otsu_threshold(gray)
        components = self._components(ink)
        runs = []
        for line in self._group_lines(components):
            for group in self._split(line, granularity):
                run = self._recognize(group)
                if run is not None:
                    runs.append(run)
        return runs

    def _components(self, ink: np.ndarray) -> list[_Component]:
        labels, count = ndimage.label(ink)
        components = []
        for y_slice, x_slice in ndimage.find_objects(labels):
            bitmap = ink[y_slice, x_slice]
            h, w = bitmap.shape
            if bitmap.sum() < 4 or h < 3:
                continue  # speckle noise
            if w > 15 * h:
                continue  # horizontal rules and table borders
            components.append(
                _Component(x_slice.start, y_slice.start, x_slice.stop, y_slice.stop, bitmap)
            )
        return components

    def _group_lines(self, components: list[_Component]) -> list[list[_Component]]:
        remaining = sorted(components, key=lambda c: (c.y0, c.x0))
        lines: list[list[_Component]] = []
        for comp in remaining:
            for line in lines:
                y0 = min(c.y0 for c in line)
                y1 = max(c.y1 for c in line)
                overlap = min(y1, comp.y1) - max(y0, comp.y0)
                if overlap > 0.4 * min(y1 - y0, comp.height):
                    line.append(comp)
                    break
            else:
                lines.append([comp])
        for line in lines:
            line.sort(key=lambda c: c.x0)
        lines.sort(key=lambda line: (min(c.y0 for c in line), min(c.x0 for c in line)))
        return lines

    def _split(self, line: list[_Component], granularity: str) -> list[list[_Component]]:
        # Merge x-overlapping components first (dots of i/j, accents).
        merged: list[list[_Component]] = [[line[0]]]
        for comp in line[1:]:
            prev_x1 = max(c.x1 for c in merged[-1])
            if comp.x0 < prev_x1 - 1:
                merged[-1].append(comp)
            else:
                merged.append([comp])
        if granularity == "line":
            return [line]
        height = max(c.height for c in line)
        gap = max(2.0, 0.33 * height)
        words: list[list[_Component]] = [merged[0][:]]
        for cluster in merged[1:]:
            prev_x1 = max(c.x1 for c in words[-1])
            if min(c.x0 for c in cluster) - prev_x1 > gap:
                words.append(cluster[:])
            else:
                words[-1].extend(cluster)
        return words

    def _recognize(self, group: list[_Component]) -> EngineRun | None:
        x0 = min(c.x0 for c in group)
        y0 = min(c.y0 for c in group)
        x1 = max(c.x1 for c in group)
        y1 = max(c.y1 for c in group)
        tallest = max(c.height for c in group)
        candidates = sorted(
            {
                s + d
                for r in _HEIGHT_RATIOS
                for d in (-1, 0, 1)
                for s in (round(tallest / r),)
                if 5 <= s + d <= 120
            }
        )
        if not candidates:
            return None
        best_text, best_score = None, -1.0
        for size in candidates:
            text, score = self._recognize_at(group, size)
            if score > best_score:
                best_text, best_score = text, score
        if not best_text or not best_text.strip():
            return None
        return EngineRun(
            text=best_text,
            quad=((x0, y0), (x1, y0), (x1, y1), (x0, y1)),
            confidence=max(0.0, min(1.0, best_score)),
            normalized=False,
        )

    def _recognize_at(self, group: list[_Component], size: int) -> tuple[str, float]:
        templates = _templates(self.font_path, size)
        clusters = self._glyph_clusters(group)
        space_gap = max(2.0, 0.28 * size)
        chars = []
        scores = []
        prev_x1 = None
        for cluster in clusters:
            cx0 = min(c.x0 for c in cluster)
            cy0 = min(c.y0 for c in cluster)
            cx1 = max(c.x1 for c in cluster)
            cy1 = max(c.y1 for c in cluster)
            bitmap = np.zeros((cy1 - cy0, cx1 - cx0), dtype=bool)
            for c in cluster:
                bitmap[c.y0 - cy0 : c.y1 - cy0, c.x0 - cx0 : c.x1 - cx0] |= c.bitmap
            char, score = max(
                ((ch, _match_score(bitmap, tpl)) for ch, tpl in templates.items()),
                key=lambda item: item[1],
            )
            if prev_x1 is not None and cx0 - prev_x1 > space_gap:
                chars.append(" ")
            chars.append(char)
            scores.append(score)
            prev_x1 = cx1
        return "".join(chars), float(np.mean(scores)) if scores else 0.0

    def _glyph_clusters(self, group: list[_Component]) -> list[list[_Component]]:
        clusters: list[list[_Component]] = [[group[0]]]
        for comp in sorted(group[1:], key=lambda c: c.x0):
            prev_x1 = max(c.x1 for c in clusters[-1])
            if comp.x0 < prev_x1 - 1:
                clusters[-1].append(comp)
            else:
                clusters.append([comp])
        return clusters


def default_engine(font_path: str | Path | None = None):
    """doctr when installed, the builtin template engine otherwise."""
    try:
        return DoctrEngine()
    except EngineError:
        return TemplateEngine(font_path)
