#!/usr/bin/env python3
"""Render the bundled seed invoice and its layout file.

Produces src/invoicesynth/assets/sample/seed_invoice.png plus the
matching canonical layout JSON. The invoice is entirely fictional. Boxes
are derived from the same font metrics used for rendering, so they are
tight around each text run. Exactly 12 fragments carry replace=true (the
bundled sample plan).
"""

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from invoicesynth.fonts import FontFace, default_font_path
from invoicesynth.layout import (
    BBox,
    LayoutDocument,
    TextFragment,
    serialize_layout,
)
from invoicesynth.planner import classify_fragment

PAGE_W, PAGE_H = 640, 880
INK = (40, 40, 48)
LIGHT = (110, 110, 120)


def main():
    face = FontFace.load(default_font_path())
    img = Image.new("RGB", (PAGE_W, PAGE_H), (252, 251, 248))
    draw = ImageDraw.Draw(img)

    # Light page furniture: rules around the line-item table.
    for y in (300, 332, 505, 560):
        draw.line([(40, y), (600, y)], fill=(180, 180, 185), width=1)
    draw.rectangle([40, 300, 600, 332], outline=(180, 180, 185), fill=(236, 238, 242))

    entries = []  # (text, x, y, size, color, replace)

    def put(text, x, y, size, color=INK, replace=False):
        entries.append((text, x, y, size, color, replace))

    put("INVOICE", 40, 42, 30)
    put("Harborview Supply Co.", 40, 96, 16, INK, True)          # 1
    put("742 Lakeshore Avenue", 40, 120, 11, INK, True)          # 2
    put("Westbrook, OR 97035", 40, 138, 11, INK, True)           # 3
    put("billing@harborview.example.com", 40, 156, 11, LIGHT)
    put("+1 (503) 555-0147", 40, 174, 11, LIGHT)

    put("Invoice No.", 420, 96, 11, LIGHT)
    put("INV-2024-0832", 505, 96, 11, INK, True)                 # 4
    put("Issue Date", 420, 118, 11, LIGHT)
    put("14/03/2024", 505, 118, 11, INK, True)                   # 5
    put("Due Date", 420, 140, 11, LIGHT)
    put("13/04/2024", 505, 140, 11, INK, True)                   # 6

    put("Bill To", 40, 214, 12, LIGHT)
    put("Meridian Analytics Ltd.", 40, 236, 13, INK, True)       # 7
    put("18 Chestnut Court", 40, 258, 11, INK, True)             # 8
    put("Granville, WA 98230", 40, 276, 11)

    put("Description", 52, 308, 11)
    put("Qty", 360, 308, 11)
    put("Unit Price", 420, 308, 11)
    put("Amount", 520, 308, 11)

    put("Quarterly maintenance service", 52, 346, 11, INK, True)  # 9
    put("3", 360, 346, 11)
    put("$420.00", 420, 346, 11)
    put("$1,260.00", 520, 346, 11)

    put("Premium license subscription", 52, 374, 11, INK, True)   # 10
    put("2", 360, 374, 11)
    put("$185.50", 420, 374, 11)
    put("$371.00", 520, 374, 11)

    put("Onsite calibration visit", 52, 402, 11)
    put("1", 360, 402, 11)
    put("$640.00", 420, 402, 11)
    put("$640.00", 520, 402, 11)

    put("Extended hardware warranty", 52, 430, 11)
    put("4", 360, 430, 11)
    put("$96.25", 420, 430, 11)
    put("$385.00", 520, 430, 11)

    put("Subtotal", 420, 476, 11, LIGHT)
    put("$2,656.00", 520, 476, 11)
    put("Tax (8.5%)", 420, 498, 11, LIGHT)
    put("$225.76", 520, 498, 11)
    put("Total Due", 420, 530, 13)
    put("$2,881.76", 512, 530, 13, INK, True)                    # 11

    put("Payment reference", 40, 600, 11, LIGHT)
    put("REF-88213", 170, 600, 11, INK, True)                 # 12
    put("Bank transfer within 30 days.", 40, 624, 11, LIGHT)
    put("Account 4471-220985-01", 40, 642, 11, LIGHT)
    put("Thank you for your business.", 40, 700, 11, LIGHT)
    put("Questions? accounts@harborview.example.com", 40, 724, 10, LIGHT)

    fragments = []
    for i, (text, x, y, size, color, replace) in enumerate(entries):
        pil = face.pil_font(size)
        draw.text((x, y), text, font=pil, fill=color, anchor="ls")
        advance = face.advance(text, size)
        ascent = face.ascent(size)
        descent_px = face.line_height(size) - ascent
        bbox = BBox(
            round(x - 1, 1),
            round(y - ascent, 1),
            round(x + advance + 1, 1),
            round(y + descent_px, 1),
        )
        fragments.append(
            TextFragment(
                id=f"frag_{i:03d}",
                text=text,
                bbox=bbox,
                content_class=classify_fragment(text),
                replace=replace,
            )
        )

    out_dir = Path(__file__).resolve().parent.parent / "src" / "invoicesynth" / "assets" / "sample"
    out_dir.mkdir(parents=True, exist_ok=True)

    arr = np.asarray(img, dtype=np.float64)
    # Gentle paper-texture noise so inpainting has something non-flat to
    # reproduce; deterministic seed.
    noise = np.random.default_rng(7).normal(0, 1.6, arr.shape[:2])[..., None]
    arr = np.clip(arr + noise, 0, 255).astype(np.uint8)
    Image.fromarray(arr).save(out_dir / "seed_invoice.png", format="PNG", compress_level=6)

    doc = LayoutDocument(
        page_width=PAGE_W,
        page_height=PAGE_H,
        source_image_ref="seed_invoice.png",
        fragments=tuple(fragments),
    )
    (out_dir / "seed_invoice.layout.json").write_text(serialize_layout(doc), encoding="utf-8")
    n_replace = sum(f.replace for f in fragments)
    print(f"wrote {len(fragments)} fragments ({n_replace} flagged) to {out_dir}")


if __name__ == "__main__":
    main()
