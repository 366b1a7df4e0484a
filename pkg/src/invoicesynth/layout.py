"""Canonical layout data model and its JSON interchange format.

The layout file is the contract between whatever produced the OCR-style
layout (an adapter, a hand-written fixture) and the generation pipeline.
Parsing is strict: invalid input is rejected, never repaired.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field, replace

__all__ = [
    "BBox",
    "ContentClass",
    "TextFragment",
    "LayoutDocument",
    "LayoutError",
    "Violation",
    "parse_layout",
    "serialize_layout",
    "validate_layout",
]

FRAGMENT_ID_RE = re.compile(r"^frag_\d{3,}$")


class LayoutError(ValueError):
    """Raised when a layout document cannot be parsed or violates an invariant."""

    def __init__(self, message, fragment_id=None, field_name=None):
        super().__init__(message)
        self.fragment_id = fragment_id
        self.field_name = field_name


class ContentClass(str, enum.Enum):
    DATE = "date"
    CURRENCY_AMOUNT = "currency_amount"
    NUMERIC_ID = "numeric_id"
    EMAIL = "email"
    PHONE = "phone"
    FREE_TEXT = "free_text"


@dataclass(frozen=True)
class BBox:
    """Axis-aligned rectangle in pixel coordinates, top-left origin."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise LayoutError(f"{name} must be a number, got {value!r}", field_name=name)
            object.__setattr__(self, name, float(value))
        if not all(v >= 0 for v in self.as_tuple()):
            raise LayoutError(f"negative coordinate in bbox {self.as_tuple()}")
        if self.x_min >= self.x_max:
            raise LayoutError(f"x_min >= x_max ({self.x_min} >= {self.x_max})", field_name="x_min")
        if self.y_min >= self.y_max:
            raise LayoutError(f"y_min >= y_max ({self.y_min} >= {self.y_max})", field_name="y_min")

    def as_tuple(self):
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def width(self):
        return self.x_max - self.x_min

    @property
    def height(self):
        return self.y_max - self.y_min

    def contains(self, other: "BBox", slack: float = 0.0) -> bool:
        return (
            other.x_min >= self.x_min - slack
            and other.y_min >= self.y_min - slack
            and other.x_max <= self.x_max + slack
            and other.y_max <= self.y_max + slack
        )


@dataclass(frozen=True)
class TextFragment:
    """One OCR'd text run: ID, verbatim text, location, class, replace flag."""

    id: str
    text: str
    bbox: BBox
    content_class: ContentClass = ContentClass.FREE_TEXT
    replace: bool = False

    def __post_init__(self):
        if not FRAGMENT_ID_RE.match(self.id):
            raise LayoutError(
                f"fragment id {self.id!r} does not match frag_NNN",
                fragment_id=self.id,
                field_name="id",
            )
        if not self.text.strip():
            raise LayoutError(
                f"empty text on {self.id}", fragment_id=self.id, field_name="text"
            )
        if "\n" in self.text or "\r" in self.text:
            raise LayoutError(
                f"newline in text on {self.id}", fragment_id=self.id, field_name="text"
            )
        if not isinstance(self.content_class, ContentClass):
            raise LayoutError(
                f"bad content_class {self.content_class!r} on {self.id}",
                fragment_id=self.id,
                field_name="content_class",
            )
        if not isinstance(self.replace, bool):
            raise LayoutError(
                f"replace flag on {self.id} must be boolean",
                fragment_id=self.id,
                field_name="replace",
            )


@dataclass(frozen=True)
class LayoutDocument:
    """A single page: dimensions, source image reference, ordered fragments."""

    page_width: int
    page_height: int
    source_image_ref: str
    fragments: tuple[TextFragment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (isinstance(self.page_width, int) and self.page_width > 0):
            raise LayoutError(f"page_width must be a positive integer, got {self.page_width!r}")
        if not (isinstance(self.page_height, int) and self.page_height > 0):
            raise LayoutError(f"page_height must be a positive integer, got {self.page_height!r}")
        # Document-level invariants (duplicate IDs, out-of-page boxes) are
        # reported by validate_layout, not raised here, so invalid documents
        # can be inspected and diagnosed.
        object.__setattr__(self, "fragments", tuple(self.fragments))

    def fragment_by_id(self, fragment_id: str) -> TextFragment:
        for frag in self.fragments:
            if frag.id == fragment_id:
                return frag
        raise KeyError(fragment_id)

    @property
    def fragment_ids(self) -> list[str]:
        return [f.id for f in self.fragments]

    def with_replace_flags(self, selected_ids) -> "LayoutDocument":
        selected = set(selected_ids)
        frags = tuple(replace(f, replace=f.id in selected) for f in self.fragments)
        return LayoutDocument(self.page_width, self.page_height, self.source_image_ref, frags)


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validate_layout."""

    fragment_id: str | None
    rule: str
    message: str


def validate_layout(doc: LayoutDocument) -> list[Violation]:
    """Check cross-fragment invariants; empty list iff the document is valid.

    Per-fragment invariants (id syntax, box orientation) are enforced at
    construction time, so only document-level rules are checked here:
    duplicate IDs and boxes escaping the page.
    """
    violations = []
    seen = set()
    for frag in doc.fragments:
        if frag.id in seen:
            violations.append(
                Violation(frag.id, "duplicate_id", f"duplicate fragment id {frag.id}")
            )
        seen.add(frag.id)
        box = frag.bbox
        if box.x_max > doc.page_width or box.y_max > doc.page_height:
            violations.append(
                Violation(
                    frag.id,
                    "bbox_out_of_page",
                    f"bbox {box.as_tuple()} of {frag.id} exceeds page "
                    f"{doc.page_width}x{doc.page_height}",
                )
            )
    return violations


_FRAGMENT_KEYS = ("id", "text", "bbox", "content_class", "replace")
_BBOX_KEYS = ("x_min", "y_min", "x_max", "y_max")
_DOC_KEYS = ("page_width", "page_height", "source_image_ref", "fragments")


def _require_keys(obj: dict, keys, context: str):
    for key in keys:
        if key not in obj:
            raise LayoutError(f"missing required field {key!r} in {context}", field_name=key)
    extra = set(obj) - set(keys)
    if extra:
        raise LayoutError(f"unknown field(s) {sorted(extra)} in {context}")


def parse_layout(text: str | bytes) -> LayoutDocument:
    """Parse canonical layout JSON into a validated LayoutDocument.

    Rejects (never repairs) malformed syntax, missing fields, duplicate
    IDs, inverted or out-of-page boxes. Errors carry the offending
    fragment ID and field name where applicable.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutError(f"malformed layout JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise LayoutError("layout document must be a JSON object")
    _require_keys(raw, _DOC_KEYS, "layout document")
    if not isinstance(raw["fragments"], list):
        raise LayoutError("fragments must be an array", field_name="fragments")
    if not isinstance(raw["source_image_ref"], str):
        raise LayoutError("source_image_ref must be a string", field_name="source_image_ref")

    fragments = []
    for i, entry in enumerate(raw["fragments"]):
        if not isinstance(entry, dict):
            raise LayoutError(f"fragment #{i} is not an object")
        context = entry.get("id") if isinstance(entry.get("id"), str) else f"fragment #{i}"
        _require_keys(entry, _FRAGMENT_KEYS, context)
        if not isinstance(entry["bbox"], dict):
            raise LayoutError(f"bbox of {context} must be an object", fragment_id=context)
        _require_keys(entry["bbox"], _BBOX_KEYS, f"bbox of {context}")
        try:
            cls = ContentClass(entry["content_class"])
        except ValueError:
            raise LayoutError(
                f"unknown content_class {entry['content_class']!r} on {context}",
                fragment_id=context,
                field_name="content_class",
            ) from None
        try:
            bbox = BBox(**entry["bbox"])
        except LayoutError as exc:
            raise LayoutError(
                f"{exc} on {context}", fragment_id=context, field_name=exc.field_name
            ) from None
        if not isinstance(entry["id"], str):
            raise LayoutError(f"id of fragment #{i} must be a string", field_name="id")
        if not isinstance(entry["text"], str):
            raise LayoutError(f"text of {context} must be a string", fragment_id=context)
        fragments.append(
            TextFragment(
                id=entry["id"],
                text=entry["text"],
                bbox=bbox,
                content_class=cls,
                replace=entry["replace"],
            )
        )

    if not isinstance(raw["page_width"], int) or isinstance(raw["page_width"], bool):
        raise LayoutError("page_width must be an integer", field_name="page_width")
    if not isinstance(raw["page_height"], int) or isinstance(raw["page_height"], bool):
        raise LayoutError("page_height must be an integer", field_name="page_height")
    doc = LayoutDocument(
        page_width=raw["page_width"],
        page_height=raw["page_height"],
        source_image_ref=raw["source_image_ref"],
        fragments=tuple(fragments),
    )
    violations = validate_layout(doc)
    if violations:
        v = violations[0]
        raise LayoutError(v.message, fragment_id=v.fragment_id, field_name=v.rule)
    return doc


def _number(value: float):
    # Integral coordinates serialize as ints so round-trips stay byte-stable.
    return int(value) if float(value).is_integer() else value


def serialize_layout(doc: LayoutDocument) -> str:
    """Serialize to the canonical JSON form: fixed key order, 2-space indent.

    Deterministic: the same document always yields byte-identical text,
    and parse_layout(serialize_layout(doc)) == doc.
    """
    payload = {
        "page_width": doc.page_width,
        "page_height": doc.page_height,
        "source_image_ref": doc.source_image_ref,
        "fragments": [
            {
                "id": f.id,
                "text": f.text,
                "bbox": {
                    "x_min": _number(f.bbox.x_min),
                    "y_min": _number(f.bbox.y_min),
                    "x_max": _number(f.bbox.x_max),
                    "y_max": _number(f.bbox.y_max),
                },
                "content_class": f.content_class.value,
                "replace": f.replace,
            }
            for f in doc.fragments
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
