"""Font loading and text measurement from outline-font metric tables.

Measurement is computed directly from the font's unitsPerEm, hmtx
advances, and (format 0) kern pairs, in float pixels. That keeps the
fitting math exact and independent of any rasterizer's rounding, while
rendering still goes through PIL with the same font file.
"""

from __future__ import annotations

import functools
import string
import warnings
from dataclasses import dataclass
from pathlib import Path

from fontTools.ttLib import TTFont
from PIL import ImageFont

__all__ = [
    "FontSpec",
    "FontFace",
    "FontError",
    "MissingGlyphWarning",
    "measure_text",
    "default_font_path",
]

_REQUIRED_COVERAGE = string.ascii_letters + string.digits + string.punctuation + " "


class FontError(ValueError):
    """Raised for unusable font files or invalid sizing parameters."""


class MissingGlyphWarning(UserWarning):
    """A character had no glyph and was measured as the replacement glyph."""


def default_font_path() -> Path:
    """The bundled fallback font used when config names none."""
    return Path(__file__).parent / "assets" / "DejaVuSans.ttf"


@dataclass(frozen=True)
class FontSpec:
    font_file_ref: Path
    min_size: int = 6
    size_step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "font_file_ref", Path(self.font_file_ref))
        if not self.font_file_ref.is_file():
            raise FontError(f"font file not found: {self.font_file_ref}")
        if self.min_size < 1:
            raise FontError("min_size must be >= 1")
        if self.size_step < 1:
            raise FontError("size_step must be >= 1")
        face = FontFace.load(self.font_file_ref)
        missing = [c for c in _REQUIRED_COVERAGE if ord(c) not in face.cmap]
        if missing:
            raise FontError(
                f"font {self.font_file_ref.name} lacks required glyphs: {missing[:8]}"
            )

    def face(self) -> "FontFace":
        return FontFace.load(self.font_file_ref)


class FontFace:
    """Metric tables of one loaded font, cached per file."""

    def __init__(self, path: Path):
        self.path = Path(path)
        try:
            font = TTFont(str(path), fontNumber=0, lazy=True)
        except Exception as exc:
            raise FontError(f"cannot load font {path}: {exc}") from exc
        self.upm = font["head"].unitsPerEm
        self.ascent_units = font["hhea"].ascent
        self.descent_units = font["hhea"].descent  # negative below baseline
        self.cmap = font.getBestCmap()
        hmtx = font["hmtx"]
        self._advances = {name: hmtx[name][0] for name in font.getGlyphOrder()}
        self._notdef_advance = hmtx[".notdef"][0] if ".notdef" in self._advances else self.upm // 2
        self._kern = {}
        if "kern" in font:
            for sub in font["kern"].kernTables:
                table = getattr(sub, "kernTable", None)
                if table:
                    self._kern.update(table)

    @staticmethod
    @functools.lru_cache(maxsize=32)
    def _load_cached(path: str) -> "FontFace":
        return FontFace(Path(path))

    @classmethod
    def load(cls, path: Path) -> "FontFace":
        return cls._load_cached(str(Path(path).resolve()))

    def line_height_units(self) -> int:
        return self.ascent_units - self.descent_units

    def line_height(self, size: float) -> float:
        """Ascent + descent in pixels at the given point size."""
        return self.line_height_units() * size / self.upm

    def ascent(self, size: float) -> float:
        return self.ascent_units * size / self.upm

    def _glyph_names(self, text: str):
        names = []
        for char in text:
            name = self.cmap.get(ord(char))
            if name is None:
                warnings.warn(
                    f"no glyph for {char!r} in {self.path.name}; "
                    "using replacement glyph",
                    MissingGlyphWarning,
                    stacklevel=3,
                )
            names.append(name)
        return names

    def advance_units(self, text: str) -> int:
        total = 0
        names = self._glyph_names(text)
        for i, name in enumerate(names):
            total += self._advances.get(name, self._notdef_advance) if name else self._notdef_advance
            if name and i + 1 < len(names) and names[i + 1]:
                total += self._kern.get((name, names[i + 1]), 0)
        return total

    def advance(self, text: str, size: float) -> float:
        """Total advance width of text in pixels, kerning included."""
        return self.advance_units(text) * size / self.upm

    @functools.lru_cache(maxsize=256)
    def pil_font(self, size: int) -> ImageFont.FreeTypeFont:
        return ImageFont.truetype(str(self.path), size)


def measure_text(text: str, font: FontSpec, size: int) -> tuple[float, float]:
    """(advance_width, line_height) in pixels at the given size.

    Both quantities are monotone non-decreasing in size. Characters the
    font cannot shape are measured as the replacement glyph and reported
    via MissingGlyphWarning.
    """
    if size < 1:
        raise FontError(f"size must be >= 1, got {size}")
    face = font.face()
    return face.advance(text, size), face.line_height(size)
