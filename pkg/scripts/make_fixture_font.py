#!/usr/bin/env python3
"""Build the fixture metrics font used by the fitting tests.

Every printable-ASCII glyph has an advance of exactly 0.6 em and the
line height (hhea ascent - descent) is exactly 1.2 em, so font fitting
has a closed-form solution. Glyph outlines are simple bars; only the
metrics matter. Writes tests/resources/fixture_metrics.ttf.
"""

from pathlib import Path

from fontTools.fontBuilder import FontBuilder
from fontTools.pens.ttGlyphPen import TTGlyphPen

UPM = 1000
ADVANCE = 600
ASCENT = 960
DESCENT = -240  # ascent - descent = 1200 = 1.2 em


def bar_glyph():
    pen = TTGlyphPen(None)
    pen.moveTo((80, 0))
    pen.lineTo((80, 700))
    pen.lineTo((520, 700))
    pen.lineTo((520, 0))
    pen.closePath()
    return pen.glyph()


def empty_glyph():
    return TTGlyphPen(None).glyph()


def main():
    chars = [chr(c) for c in range(0x20, 0x7F)]
    glyph_order = [".notdef"] + [f"uni{ord(c):04X}" for c in chars]
    fb = FontBuilder(UPM, isTTF=True)
    fb.setupGlyphOrder(glyph_order)
    fb.setupCharacterMap({ord(c): f"uni{ord(c):04X}" for c in chars})
    glyphs = {".notdef": bar_glyph()}
    for c in chars:
        glyphs[f"uni{ord(c):04X}"] = empty_glyph() if c == " " else bar_glyph()
    fb.setupGlyf(glyphs)
    fb.setupHorizontalMetrics({name: (ADVANCE, 0) for name in glyph_order})
    fb.setupHorizontalHeader(ascent=ASCENT, descent=DESCENT)
    fb.setupNameTable({"familyName": "FixtureMetrics", "styleName": "Regular"})
    fb.setupOS2(sTypoAscender=ASCENT, sTypoDescender=DESCENT, usWinAscent=ASCENT, usWinDescent=-DESCENT)
    fb.setupPost()
    out = Path(__file__).resolve().parent.parent / "tests" / "resources" / "fixture_metrics.ttf"
    out.parent.mkdir(parents=True, exist_ok=True)
    fb.save(str(out))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
