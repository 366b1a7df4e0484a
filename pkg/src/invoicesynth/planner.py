"""Content classification and replacement-target selection.

Selection rules evaluate in order with last-match-wins semantics (like a
firewall rule chain). When no rule matches a fragment, its `replace` flag
from the layout file decides, so a hand-curated layout works with no rules
at all.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .layout import ContentClass, LayoutDocument

__all__ = [
    "RuleKind",
    "RuleAction",
    "SelectionRule",
    "PlanEntry",
    "ReplacementPlan",
    "PlanError",
    "classify_fragment",
    "select_targets",
]


class PlanError(ValueError):
    """Raised for invalid selection rules (bad pattern, unknown fragment ID)."""


class RuleKind(str, enum.Enum):
    BY_ID = "by_id"
    BY_CLASS = "by_class"
    BY_PATTERN = "by_pattern"


class RuleAction(str, enum.Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"


@dataclass(frozen=True)
class SelectionRule:
    """One include/exclude rule over fragments.

    payload is a list of fragment IDs (by_id), a ContentClass (by_class),
    or a regex string matched against fragment text (by_pattern). An
    optional role label names the field in the emitted ground truth.
    """

    kind: RuleKind
    payload: object
    action: RuleAction = RuleAction.INCLUDE
    role: str | None = None

    def __post_init__(self):
        if self.kind is RuleKind.BY_ID:
            ids = self.payload
            if not isinstance(ids, (list, tuple)) or not ids:
                raise PlanError("by_id rule needs a non-empty ID list")
            object.__setattr__(self, "payload", tuple(ids))
        elif self.kind is RuleKind.BY_CLASS:
            if not isinstance(self.payload, ContentClass):
                try:
                    object.__setattr__(self, "payload", ContentClass(self.payload))
                except ValueError:
                    raise PlanError(f"unknown content class {self.payload!r}") from None
        elif self.kind is RuleKind.BY_PATTERN:
            if not isinstance(self.payload, str) or not self.payload:
                raise PlanError("by_pattern rule needs a non-empty pattern string")
            try:
                re.compile(self.payload)
            except re.error as exc:
                raise PlanError(f"invalid pattern {self.payload!r}: {exc}") from exc

    def matches(self, fragment) -> bool:
        if self.kind is RuleKind.BY_ID:
            return fragment.id in self.payload
        if self.kind is RuleKind.BY_CLASS:
            return classify_fragment(fragment.text) is self.payload
        return re.search(self.payload, fragment.text) is not None


@dataclass(frozen=True)
class PlanEntry:
    fragment_id: str
    original_text: str
    content_class: ContentClass
    role: str | None = None


@dataclass(frozen=True)
class ReplacementPlan:
    """Ordered list of fragments to replace, in document order."""

    entries: tuple[PlanEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        ids = [e.fragment_id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise PlanError("duplicate fragment IDs in plan")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ids(self) -> list[str]:
        return [e.fragment_id for e in self.entries]

    def entry(self, fragment_id: str) -> PlanEntry:
        for e in self.entries:
            if e.fragment_id == fragment_id:
                return e
        raise KeyError(fragment_id)


_MONTHS = "Jan|Feb|Mar|Apr|May|Jun|Jul|Aug|Sep|Oct|Nov|Dec"

# Precedence-ordered detectors; first full match wins, free_text is the
# total fallback.
_DATE_RE = re.compile(
    r"^(?:\d{1,2}([/.-])\d{1,2}\1\d{2,4}"
    r"|\d{4}([/-])\d{1,2}\2\d{1,2}"
    rf"|\d{{1,2}}\s+(?:{_MONTHS})[a-z]*\.?,?\s+\d{{4}})$"
)
_CURRENCY_RE = re.compile(
    r"^(?:"
    r"[$€£]\s?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d{2})?"  # sigil; grouping optional
    r"|\d{1,3}(?:,\d{3})+(?:\.\d{2})?"                 # no sigil, grouped
    r"|\d+\.\d{2}"                                     # no sigil, 2-decimal tail
    r")$"
)
_EMAIL_RE = re.compile(r"^[\w.+-]+@[\w-]+(?:\.[\w-]+)+$")
_PHONE_RE = re.compile(r"^\+?[\d(][\d\s().-]{5,18}\d$")
_NUMERIC_ID_RE = re.compile(r"^(?:[A-Za-z]{1,5}[-#/ ]?)?\d[\d\-/]*$")


def classify_fragment(text: str) -> ContentClass:
    """Classify a text run into its content class.

    Deterministic and total: detectors run in fixed precedence order
    (date, currency, email, phone, numeric id) and anything unmatched is
    free text.
    """
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


def select_targets(doc: LayoutDocument, rules: list[SelectionRule]) -> ReplacementPlan:
    """Compile the replacement plan for a document.

    A fragment is selected when the last rule matching it says include,
    or, if no rule matches, when its own replace flag is set. by_id rules
    naming unknown fragments fail loudly rather than silently matching
    nothing.
    """
    known_ids = set(doc.fragment_ids)
    for rule in rules:
        if rule.kind is RuleKind.BY_ID:
            missing = [i for i in rule.payload if i not in known_ids]
            if missing:
                raise PlanError(f"selection rule references unknown fragment ID(s): {missing}")

    entries = []
    for frag in doc.fragments:
        decision = frag.replace
        role = None
        for rule in rules:
            if rule.matches(frag):
                decision = rule.action is RuleAction.INCLUDE
                role = rule.role if decision else None
        if decision:
            entries.append(
                PlanEntry(
                    fragment_id=frag.id,
                    original_text=frag.text,
                    content_class=classify_fragment(frag.text),
                    role=role,
                )
            )
    return ReplacementPlan(tuple(entries))
