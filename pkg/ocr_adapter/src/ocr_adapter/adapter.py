"""Turn engine output into a canonical layout file.

The emitted JSON is the sole contract with the generation pipeline: page
dimensions, source image reference, and a fragments array with frag_NNN
IDs in reading order. Classification duplicates the pipeline's rule table
on purpose; sharing code across the package boundary would couple the two
through anything other than the layout file.
"""

from __future__ import annotations

import enum
import json
import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .engine import GRANULARITIES, EngineError, default_engine

__all__ = ["AdapterError", "extract_layout", "classify_text"]


class AdapterError(RuntimeError):
    """The image cannot be read or the engine output cannot be converted."""


class ContentClass(str, enum.Enum):
    DATE = "date"
    CURRENCY_AMOUNT = "currency_amount"
    NUMERIC_ID = "numeric_id"
    EMAIL = "email"
    PHONE = "phone"
    FREE_TEXT = "free_text"


_MONTHS = "Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec"
_DATE_RE = re.compile(
    r"^(?:\d{1,2}([/.-])\d{1,2}\1\d{2,4}"
    r"|\d{4}([/-])\d{1,2}\2\d{1,2}"
    rf"|\d{{1,2}}\s+(?:{_MONTHS})[a-z]*\.?,?\s+\d{{4}})$"
)
_CURRENCY_RE = re.compile(
    r"^(?:"
    r"[$€£]\s?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d{2})?"
    r"|\d{1,3}(?:,\d{3})+(?:\.\d{2})?"
    r"|\d+\.\d{2}"
    r")$"
)
_EMAIL_RE = re.compile(r"^[\w.+-]+@[\w-]+(?:\.[\w-]+)+$")
_PHONE_RE = re.compile(r"^\+?[\d(][\d\s().-]{5,18}\d$")
_NUMERIC_ID_RE = re.compile(r"^(?:[A-Za-z]{1,5}[-#/ ]?)?\d[\d\-/]*$")


def classify_text(text: str) -> ContentClass:
    """Content class by fixed-precedence detectors; free_text is the fallback."""
    t = text.strip()
    if not t:
        raise ValueError("cannot classify empty text")
    if _DATE_RE.match(t):
        return ContentClass.DATE
    if _CURRENCY_RE.match(t):
        return ContentClass.CURRENCY_AMOUNT
    if _EMAIL_RE.match(t):
        return ContentClass.EMAIL
    if _PHONE_RE.match(t) and sum(c.isdigit() for c in t) >= 7:
        return ContentClass.PHONE
    if _NUMERIC_ID_RE.match(t):
        return ContentClass.NUMERIC_ID
    return ContentClass.FREE_TEXT


@dataclass(frozen=True)
class _Fragment:
    text: str
    x_min: float
    y_min: float
    x_max: float
    y_max: float


def _num(value: float):
    value = round(float(value), 2)
    return int(value) if value.is_integer() else value


def _to_fragment(run, width: int, height: int) -> _Fragment | None:
    xs = [p[0] for p in run.quad]
    ys = [p[1] for p in run.quad]
    if run.normalized:
        xs = [x * width for x in xs]
        ys = [y * height for y in ys]
    x_min = max(0.0, min(xs))
    y_min = max(0.0, min(ys))
    x_max = min(float(width), max(xs))
    y_max = min(float(height), max(ys))
    text = run.text.replace("\n", " ").replace("\r", " ").strip()
    if not text or x_min >= x_max or y_min >= y_max:
        return None
    return _Fragment(text, x_min, y_min, x_max, y_max)


def extract_layout(
    image_path: str | Path,
    min_confidence: float = 0.3,
    granularity: str = "line",
    engine=None,
) -> str:
    """Run OCR over an image and return canonical layout document text.

    Runs below min_confidence are dropped, quadrilaterals collapse to
    their axis-aligned bounding rectangle, normalized coordinates convert
    to pixels using the true image dimensions, and fragments are numbered
    frag_000 onward in reading order (top-to-bottom, then left-to-right
    by box top-left). All replace flags start false; selecting targets is
    the pipeline's job, not the adapter's.
    """
    if granularity not in GRANULARITIES:
        raise AdapterError(f"granularity must be one of {GRANULARITIES}, got {granularity!r}")
    image_path = Path(image_path)
    try:
        with Image.open(image_path) as img:
            image = np.asarray(img.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise AdapterError(f"cannot read image {image_path}: {exc}") from exc
    height, width = image.shape[:2]

    if engine is None:
        engine = default_engine()
    try:
        runs = engine.run(image, granularity)
    except EngineError:
        raise
    except Exception as exc:
        raise EngineError(f"{getattr(engine, 'name', engine)} failed: {exc}") from exc

    fragments = []
    for run in runs:
        if run.confidence < min_confidence:
            continue
        fragment = _to_fragment(run, width, height)
        if fragment is not None:
            fragments.append(fragment)
    fragments.sort(key=lambda f: (f.y_min, f.x_min))
    if not fragments:
        warnings.warn(f"no text fragments detected in {image_path.name}", stacklevel=2)

    document = {
        "page_width": width,
        "page_height": height,
        "source_image_ref": image_path.name,
        "fragments": [
            {
                "id": f"frag_{i:03d}",
                "text": frag.text,
                "bbox": {
                    "x_min": _num(frag.x_min),
                    "y_min": _num(frag.y_min),
                    "x_max": _num(frag.x_max),
                    "y_max": _num(frag.y_max),
                },
                "content_class": classify_text(frag.text).value,
                "replace": False,
            }
            for i, frag in enumerate(fragments)
        ],
    }
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
