import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invoicesynth.layout import BBox
from invoicesynth.raster import (
    MASK_INPAINT,
    RasterError,
    build_mask,
    check_mask,
    load_image,
    save_image,
)


class TestBuildMask:
    def test_single_box_inclusive_cover(self):
        mask = build_mask(100, 100, [BBox(10, 10, 20, 20)], pad=0)
        assert int((mask == MASK_INPAINT).sum()) == 11 * 11
        assert mask[10, 10] == MASK_INPAINT
        assert mask[20, 20] == MASK_INPAINT
        assert mask[9, 10] == 0
        assert mask[21, 20] == 0

    def test_no_boxes(self):
        assert build_mask(50, 40, [], pad=2).sum() == 0

    def test_pad_dilates(self):
        mask = build_mask(100, 100, [BBox(10, 10, 20, 20)], pad=2)
        assert int((mask == MASK_INPAINT).sum()) == 15 * 15

    def test_clipped_at_page_edge(self):
        mask = build_mask(30, 30, [BBox(25, 25, 29, 29)], pad=3)
        assert mask[29, 29] == MASK_INPAINT
        assert int((mask > 0).sum()) == 8 * 8

    def test_fractional_coordinates_rounded_outward(self):
        mask = build_mask(50, 50, [BBox(10.3, 10.7, 12.2, 11.1)], pad=0)
        ys, xs = np.nonzero(mask)
        assert xs.min() == 10 and xs.max() == 13
        assert ys.min() == 10 and ys.max() == 12

    def test_overlapping_boxes_union_brute_force(self):
        boxes = [BBox(5, 5, 15, 12), BBox(10, 8, 22, 20), BBox(3, 18, 8, 25)]
        pad = 1
        mask = build_mask(40, 40, boxes, pad=pad)

        # Independent oracle: per-pixel point-in-box test.
        expected = 0
        import math

        for py in range(40):
            for px in range(40):
                inside = any(
                    math.floor(b.x_min) - pad <= px <= math.ceil(b.x_max) + pad
                    and math.floor(b.y_min) - pad <= py <= math.ceil(b.y_max) + pad
                    for b in boxes
                )
                expected += inside
                assert (mask[py, px] == MASK_INPAINT) == inside
        assert int((mask == MASK_INPAINT).sum()) == expected

    def test_zero_page_rejected(self):
        with pytest.raises(RasterError):
            build_mask(0, 10, [], pad=0)

    def test_disjoint_box_rejected(self):
        with pytest.raises(RasterError, match="intersect"):
            build_mask(50, 50, [BBox(60, 60, 70, 70)], pad=0)

    def test_mask_is_binary(self):
        mask = build_mask(64, 64, [BBox(1, 1, 60, 60)], pad=0)
        check_mask(mask)


@settings(max_examples=40, deadline=None)
@given(
    x0=st.integers(0, 35), y0=st.integers(0, 35),
    w=st.integers(1, 12), h=st.integers(1, 12),
    pad=st.integers(0, 3),
)
def test_mask_count_property(x0, y0, w, h, pad):
    box = BBox(x0, y0, x0 + w, y0 + h)
    mask = build_mask(48, 48, [box], pad=pad)
    ex0, ey0 = max(x0 - pad, 0), max(y0 - pad, 0)
    ex1, ey1 = min(x0 + w + pad, 47), min(y0 + h + pad, 47)
    assert int((mask > 0).sum()) == (ex1 - ex0 + 1) * (ey1 - ey0 + 1)


class TestImageIO:
    def test_png_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        image = rng.integers(0, 256, (20, 30, 3)).astype(np.uint8)
        path = tmp_path / "img.png"
        save_image(image, path)
        assert np.array_equal(load_image(path), image)

    def test_save_rejects_bad_shape(self, tmp_path):
        with pytest.raises(RasterError):
            save_image(np.zeros((10, 10), dtype=np.uint8), tmp_path / "x.png")

    def test_save_deterministic_bytes(self, tmp_path):
        image = np.arange(20 * 30 * 3, dtype=np.uint32).reshape(20, 30, 3).astype(np.uint8)
        save_image(image, tmp_path / "a.png")
        save_image(image, tmp_path / "b.png")
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
