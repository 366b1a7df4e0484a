"""Turning a replacement plan into synthetic text.

Two routes produce a ReplacementMap: a remote chat-completion endpoint
(prompt construction, strict response parsing, bounded retries with
feedback) and a deterministic seeded mock for offline runs. Both routes
end at the same validation: key sets must match the plan exactly and
every value must keep its fragment's content class.
"""

from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass, field

import requests

from . import _mockdata
from .layout import ContentClass
from .planner import PlanEntry, ReplacementPlan, classify_fragment

__all__ = [
    "ReplacementMap",
    "GeneratorConfig",
    "GenerationError",
    "EmptyPlanError",
    "ResponseFormatError",
    "UnparseableResponseError",
    "MultipleObjectsError",
    "MissingIdError",
    "ExtraneousIdError",
    "InvalidValueError",
    "TransportError",
    "AuthError",
    "RetriesExhaustedError",
    "ClassViolation",
    "build_prompt",
    "parse_response",
    "validate_replacements",
    "mock_generate",
    "generate",
]


class GenerationError(Exception):
    """Base class for content-generation failures."""


class EmptyPlanError(GenerationError):
    """No fragments to replace; callers must skip generation entirely."""


class ResponseFormatError(GenerationError):
    """The endpoint's response violates the single-JSON-object contract."""


class UnparseableResponseError(ResponseFormatError):
    pass


class MultipleObjectsError(ResponseFormatError):
    pass


class MissingIdError(ResponseFormatError):
    def __init__(self, fragment_id):
        super().__init__(f"response is missing fragment {fragment_id}")
        self.fragment_id = fragment_id


class ExtraneousIdError(ResponseFormatError):
    def __init__(self, fragment_id):
        super().__init__(f"response contains unknown fragment {fragment_id}")
        self.fragment_id = fragment_id


class InvalidValueError(ResponseFormatError):
    def __init__(self, fragment_id, reason):
        super().__init__(f"invalid value for {fragment_id}: {reason}")
        self.fragment_id = fragment_id


class TransportError(GenerationError):
    """HTTP-level failure talking to the endpoint."""


class AuthError(GenerationError):
    """The endpoint rejected our credentials."""


class RetriesExhaustedError(GenerationError):
    def __init__(self, attempts, last_errors):
        super().__init__(
            f"gave up after {attempts} attempt(s); last errors: "
            + "; ".join(str(e) for e in last_errors)
        )
        self.attempts = attempts
        self.last_errors = list(last_errors)


@dataclass(frozen=True)
class ReplacementMap:
    """fragment_id -> synthetic text, in plan order."""

    entries: dict[str, str]

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, fragment_id):
        return self.entries[fragment_id]

    def to_json(self) -> str:
        return json.dumps(self.entries, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class GeneratorConfig:
    mode: str = "mock"
    seed: int = 0
    endpoint: str | None = None
    model: str | None = None
    auth_env: str | None = None
    max_retries: int = 2
    timeout: float = 30.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("mock", "remote"):
            raise ValueError(f"unknown generator mode {self.mode!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode == "remote":
            if not self.endpoint:
                raise ValueError("remote mode requires an endpoint URL")
            if not self.auth_env:
                raise ValueError("remote mode requires an auth token env var name")


_PROMPT_HEADER = (
    "You are generating fictional replacement values for fields extracted "
    "from an invoice. For each item below, generate a realistic but "
    "fictional replacement, maintaining the content type: a date with a "
    "date, a currency amount with a currency amount, an identifier with "
    "an identifier, and so on.\n"
    "Return only a single JSON object that maps each fragment ID to its "
    "replacement text. Do not add commentary or any other output.\n"
    "\n"
    "Items:\n"
)


def build_prompt(plan: ReplacementPlan) -> str:
    """Build the generation prompt: instructions plus one `id: text` line
    per plan entry, in plan order. Deterministic."""
    if len(plan) == 0:
        raise EmptyPlanError("cannot build a prompt for an empty plan")
    lines = [f"{e.fragment_id}: {e.original_text}" for e in plan]
    return _PROMPT_HEADER + "\n".join(lines) + "\n"


_FENCE_RE = re.compile(r"^```[a-zA-Z0-9_-]*\s*\n(.*?)\n?```\s*$", re.DOTALL)


def parse_response(raw: str, plan: ReplacementPlan) -> ReplacementMap:
    """Parse and structurally validate an endpoint response.

    Accepts the bare JSON object or the same object wrapped in a markdown
    code fence. Each failure mode raises a distinct error class so the
    retry policy can react: unparseable text, multiple top-level values,
    a missing ID, an extraneous ID, or an empty/newline value.
    """
    text = raw.strip()
    fenced = _FENCE_RE.match(text)
    if fenced:
        text = fenced.group(1).strip()

    decoder = json.JSONDecoder()
    try:
        obj, end = decoder.raw_decode(text)
    except json.JSONDecodeError as exc:
        raise UnparseableResponseError(f"response is not valid JSON: {exc}") from exc
    if text[end:].strip():
        raise MultipleObjectsError("response contains more than one top-level JSON value")
    if not isinstance(obj, dict):
        raise UnparseableResponseError("response top-level value is not an object")

    plan_ids = plan.ids
    for fragment_id in plan_ids:
        if fragment_id not in obj:
            raise MissingIdError(fragment_id)
    for key in obj:
        if key not in plan_ids:
            raise ExtraneousIdError(key)
    for fragment_id, value in obj.items():
        if not isinstance(value, str):
            raise InvalidValueError(fragment_id, f"not a string: {value!r}")
        if not value.strip():
            raise InvalidValueError(fragment_id, "empty text")
        if "\n" in value or "\r" in value:
            raise InvalidValueError(fragment_id, "contains a newline")

    return ReplacementMap({fragment_id: obj[fragment_id] for fragment_id in plan_ids})


@dataclass(frozen=True)
class ClassViolation:
    fragment_id: str
    expected: ContentClass
    actual: ContentClass
    value: str

    def __str__(self):
        return (
            f"{self.fragment_id}: expected {self.expected.value}, "
            f"got {self.actual.value} for {self.value!r}"
        )


def validate_replacements(mapping: ReplacementMap, plan: ReplacementPlan) -> list[ClassViolation]:
    """One violation per value whose content class differs from the plan's."""
    violations = []
    for entry in plan:
        value = mapping[entry.fragment_id]
        actual = classify_fragment(value)
        if actual is not entry.content_class:
            violations.append(
                ClassViolation(entry.fragment_id, entry.content_class, actual, value)
            )
    return violations


# --- mock generator ---------------------------------------------------------

_NUMERIC_DATE_RE = re.compile(r"^(\d{1,4})([/.-])(\d{1,2})\2(\d{2,4})$")
_TEXT_DATE_RE = re.compile(
    r"^(\d{1,2})\s+([A-Za-z]+\.?,?)\s+(\d{4})$"
)
_CURRENCY_PARSE_RE = re.compile(r"^([$€£]?)(\s?)([\d,]+)(\.\d{2})?$")


def _entry_rng(seed: int, fragment_id: str) -> random.Random:
    # Per-fragment stream keyed on (seed, id): insensitive to plan size
    # and ordering, deterministic across hosts.
    return random.Random(f"{seed}:{fragment_id}")


def _mock_date(original: str, rng: random.Random) -> str:
    day = rng.randint(1, 28)
    month = rng.randint(1, 12)
    year = rng.randint(2020, 2029)
    m = _NUMERIC_DATE_RE.match(original)
    if m:
        first, sep, _, last = m.groups()
        if len(first) == 4:  # ISO-style year-first
            return f"{year:04d}{sep}{month:02d}{sep}{day:02d}"
        year_str = f"{year:04d}" if len(last) == 4 else f"{year % 100:02d}"
        return f"{day:02d}{sep}{month:02d}{sep}{year_str}"
    m = _TEXT_DATE_RE.match(original)
    if m:
        return f"{day:02d} {_mockdata.MONTH_ABBREVS[month - 1]} {year:04d}"
    return f"{day:02d}/{month:02d}/{year:04d}"


def _mock_currency(original: str, rng: random.Random) -> str:
    m = _CURRENCY_PARSE_RE.match(original)
    sigil, space, intpart, decimals = m.groups() if m else ("$", "", "0", ".00")
    has_decimals = decimals is not None
    cents = rng.randint(100, 9999999)
    if not sigil and not has_decimals:
        # Grouping is the only currency marker; keep the amount >= 1000 so
        # a comma survives and the value still classifies as currency.
        cents = rng.randint(100000, 9999999)
    amount = cents / 100
    grouped = "," in intpart
    if grouped:
        body = f"{int(amount):,d}"
    else:
        body = f"{int(amount):d}"
    if has_decimals:
        body += f".{cents % 100:02d}"
    return f"{sigil}{space}{body}" if m else f"${body}"


def _resample_digits(original: str, rng: random.Random) -> str:
    return "".join(str(rng.randint(0, 9)) if c.isdigit() else c for c in original)


def _mock_email(rng: random.Random) -> str:
    first = rng.choice(_mockdata.FIRST_NAMES).lower()
    last = rng.choice(_mockdata.LAST_NAMES).lower()
    domain = rng.choice(_mockdata.EMAIL_DOMAINS)
    return f"{first}.{last}@{domain}"


_FREE_TEXT_POOL = (
    _mockdata.COMPANY_STEMS
    + _mockdata.COMPANY_SUFFIXES
    + _mockdata.FIRST_NAMES
    + _mockdata.LAST_NAMES
    + _mockdata.STREET_NAMES
    + _mockdata.STREET_KINDS
    + _mockdata.CITIES
    + _mockdata.ITEM_WORDS
)


def _mock_free_text(original: str, rng: random.Random) -> str:
    # Target length within ±40% of the original so the font-fitting stage
    # gets exercised in both directions.
    target = len(original)
    lo = max(1, round(target * 0.6))
    hi = max(lo, int(target * 1.4))
    words: list[str] = []
    while True:
        word = rng.choice(_FREE_TEXT_POOL)
        candidate = " ".join(words + [word])
        if len(candidate) > hi:
            if words:
                break
            # Single word already too long: truncate to fit.
            words = [word[:hi]]
            break
        words.append(word)
        if len(candidate) >= lo:
            break
    text = " ".join(words)
    if len(text) < lo:
        text = (text + " " + rng.choice(_FREE_TEXT_POOL))[:hi]
    return text.strip()


def _mock_value(entry: PlanEntry, rng: random.Random) -> str:
    cls = entry.content_class
    if cls is ContentClass.DATE:
        return _mock_date(entry.original_text.strip(), rng)
    if cls is ContentClass.CURRENCY_AMOUNT:
        return _mock_currency(entry.original_text.strip(), rng)
    if cls is ContentClass.EMAIL:
        return _mock_email(rng)
    if cls in (ContentClass.NUMERIC_ID, ContentClass.PHONE):
        return _resample_digits(entry.original_text.strip(), rng)
    return _mock_free_text(entry.original_text.strip(), rng)


def mock_generate(plan: ReplacementPlan, seed: int) -> ReplacementMap:
    """Deterministic offline replacement generator.

    A pure function of (plan, seed). Every value keeps its entry's
    content class by construction, so validate_replacements is empty.
    """
    entries = {}
    for entry in plan:
        rng = _entry_rng(seed, entry.fragment_id)
        value = _mock_value(entry, rng)
        # The class-preserving constructions above can in principle drift
        # (e.g. a truncated word hitting a detector); resample until clean.
        for _ in range(16):
            if classify_fragment(value) is entry.content_class:
                break
            value = _mock_value(entry, rng)
        entries[entry.fragment_id] = value
    return ReplacementMap(entries)


# --- remote generator -------------------------------------------------------


def _call_endpoint(prompt: str, config: GeneratorConfig) -> str:
    headers = {"Content-Type": "application/json"}
    if config.auth_env:
        token = os.environ.get(config.auth_env)
        if not token:
            raise AuthError(f"auth token environment variable {config.auth_env} is not set")
        headers["Authorization"] = f"Bearer {token}"
    payload = {
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
    }
    payload.update(config.params)
    try:
        resp = requests.post(
            config.endpoint, json=payload, headers=headers, timeout=config.timeout
        )
    except requests.RequestException as exc:
        raise TransportError(f"endpoint call failed: {exc}") from exc
    if resp.status_code in (401, 403):
        raise AuthError(f"endpoint rejected credentials (HTTP {resp.status_code})")
    if resp.status_code != 200:
        raise TransportError(f"endpoint returned HTTP {resp.status_code}: {resp.text[:200]}")
    try:
        body = resp.json()
        return body["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"endpoint response has unexpected shape: {exc}") from exc


def generate(plan: ReplacementPlan, config: GeneratorConfig) -> ReplacementMap:
    """Produce a fully validated ReplacementMap for a plan.

    Mock mode delegates to mock_generate. Remote mode builds the prompt,
    calls the endpoint, parses strictly, and retries up to max_retries
    with the previous failure appended to the prompt as feedback.
    """
    if len(plan) == 0:
        raise EmptyPlanError("refusing to generate for an empty plan")
    if config.mode == "mock":
        return mock_generate(plan, config.seed)

    base_prompt = build_prompt(plan)
    feedback = ""
    last_errors: list[Exception | ClassViolation] = []
    attempts = config.max_retries + 1
    for _ in range(attempts):
        raw = _call_endpoint(base_prompt + feedback, config)
        try:
            mapping = parse_response(raw, plan)
        except ResponseFormatError as exc:
            last_errors = [exc]
            feedback = (
                "\nYour previous response was rejected: "
                f"{exc}. Return only the single corrected JSON object.\n"
            )
            continue
        violations = validate_replacements(mapping, plan)
        if not violations:
            return mapping
        last_errors = list(violations)
        feedback = (
            "\nYour previous response had wrong content types:\n"
            + "\n".join(str(v) for v in violations)
            + "\nReturn only the single corrected JSON object.\n"
        )
    raise RetriesExhaustedError(attempts, last_errors)
