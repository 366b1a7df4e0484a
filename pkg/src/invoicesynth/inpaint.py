"""Text removal by fast-marching inpainting.

Masked pixels are filled in ascending distance from the mask boundary.
The distance field solves the discrete eikonal equation on the
4-neighborhood; the frontier lives in a binary min-heap keyed by
(distance, row-major index) so runs are reproducible. Each pixel is set
per channel to a weighted average of already-known pixels within the
radius, weighting by direction (alignment of the offset with the distance
gradient), inverse squared distance, and distance-level proximity.

Only pixels with strictly smaller distance contribute to an estimate, so
the result is independent of tie ordering and the fill is provably
monotone in distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .raster import MASK_INPAINT, check_image, check_mask

__all__ = ["InpaintParams", "InpaintError", "inpaint", "inpaint_traced"]

_KNOWN = 0
_BAND = 1
_INSIDE = 2
_FAR = 1e30


class InpaintError(ValueError):
    """Raised for unusable inputs (dimension mismatch, all-masked image)."""


@dataclass(frozen=True)
class InpaintParams:
    radius: int = 3
    mask_pad: int = 2

    def __post_init__(self):
        if self.radius < 1:
            raise InpaintError("radius must be >= 1")
        if self.mask_pad < 0:
            raise InpaintError("mask_pad must be >= 0")


@njit(cache=True)
def _heap_push(heap_t, heap_i, size, t, idx):
    heap_t[size] = t
    heap_i[size] = idx
    child = size
    while child > 0:
        parent = (child - 1) // 2
        if heap_t[child] < heap_t[parent] or (
            heap_t[child] == heap_t[parent] and heap_i[child] < heap_i[parent]
        ):
            heap_t[child], heap_t[parent] = heap_t[parent], heap_t[child]
            heap_i[child], heap_i[parent] = heap_i[parent], heap_i[child]
            child = parent
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(heap_t, heap_i, size):
    top_t = heap_t[0]
    top_i = heap_i[0]
    size -= 1
    heap_t[0] = heap_t[size]
    heap_i[0] = heap_i[size]
    parent = 0
    while True:
        left = 2 * parent + 1
        right = left + 1
        smallest = parent
        if left < size and (
            heap_t[left] < heap_t[smallest]
            or (heap_t[left] == heap_t[smallest] and heap_i[left] < heap_i[smallest])
        ):
            smallest = left
        if right < size and (
            heap_t[right] < heap_t[smallest]
            or (heap_t[right] == heap_t[smallest] and heap_i[right] < heap_i[smallest])
        ):
            smallest = right
        if smallest == parent:
            break
        heap_t[parent], heap_t[smallest] = heap_t[smallest], heap_t[parent]
        heap_i[parent], heap_i[smallest] = heap_i[smallest], heap_i[parent]
        parent = smallest
    return top_t, top_i, size


@njit(cache=True)
def _solve_eikonal(T, flags, i, j, h, w):
    """Distance update at (i, j) from its finalized 4-neighbors, unit speed."""
    a = _FAR
    if j > 0 and flags[i, j - 1] == _KNOWN:
        a = T[i, j - 1]
    if j < w - 1 and flags[i, j + 1] == _KNOWN and T[i, j + 1] < a:
        a = T[i, j + 1]
    b = _FAR
    if i > 0 and flags[i - 1, j] == _KNOWN:
        b = T[i - 1, j]
    if i < h - 1 and flags[i + 1, j] == _KNOWN and T[i + 1, j] < b:
        b = T[i + 1, j]
    if a >= _FAR and b >= _FAR:
        return _FAR
    if a >= _FAR:
        return b + 1.0
    if b >= _FAR:
        return a + 1.0
    d = a - b
    if d > 1.0:
        return b + 1.0
    if d < -1.0:
        return a + 1.0
    return (a + b + np.sqrt(2.0 - d * d)) / 2.0


@njit(cache=True)
def _estimate_pixel(img, T, flags, i, j, t, radius, out):
    h, w = T.shape
    # Distance-field gradient at p; one-sided where neighbors are unknown.
    left = T[i, j - 1] if (j > 0 and flags[i, j - 1] == _KNOWN) else t
    right = T[i, j + 1] if (j < w - 1 and flags[i, j + 1] == _KNOWN) else t
    up = T[i - 1, j] if (i > 0 and flags[i - 1, j] == _KNOWN) else t
    down = T[i + 1, j] if (i < h - 1 and flags[i + 1, j] == _KNOWN) else t
    gx = (right - left) / 2.0
    gy = (down - up) / 2.0
    gnorm = np.sqrt(gx * gx + gy * gy)

    wsum = 0.0
    acc0 = 0.0
    acc1 = 0.0
    acc2 = 0.0
    r2max = radius * radius
    for di in range(-radius, radius + 1):
        qi = i + di
        if qi < 0 or qi >= h:
            continue
        for dj in range(-radius, radius + 1):
            if di == 0 and dj == 0:
                continue
            qj = j + dj
            if qj < 0 or qj >= w:
                continue
            d2 = di * di + dj * dj
            if d2 > r2max:
                continue
            if flags[qi, qj] != _KNOWN or T[qi, qj] >= t:
                continue
            d = np.sqrt(d2)
            if gnorm > 1e-12:
                direction = abs(dj * gx + di * gy) / (d * gnorm)
                if direction < 1e-6:
                    direction = 1e-6
            else:
                direction = 1.0
            dst = 1.0 / d2
            lev = 1.0 / (1.0 + abs(t - T[qi, qj]))
            wgt = direction * dst * lev
            wsum += wgt
            acc0 += wgt * img[qi, qj, 0]
            acc1 += wgt * img[qi, qj, 1]
            acc2 += wgt * img[qi, qj, 2]

    if wsum <= 0.0:
        # Degenerate: no strictly-closer known pixel in range (cannot occur
        # for radius >= 1 with a boundary-seeded band, kept as a safeguard).
        n = 0.0
        if j > 0 and flags[i, j - 1] == _KNOWN:
            acc0 += img[i, j - 1, 0]; acc1 += img[i, j - 1, 1]; acc2 += img[i, j - 1, 2]; n += 1.0
        if j < w - 1 and flags[i, j + 1] == _KNOWN:
            acc0 += img[i, j + 1, 0]; acc1 += img[i, j + 1, 1]; acc2 += img[i, j + 1, 2]; n += 1.0
        if i > 0 and flags[i - 1, j] == _KNOWN:
            acc0 += img[i - 1, j, 0]; acc1 += img[i - 1, j, 1]; acc2 += img[i - 1, j, 2]; n += 1.0
        if i < h - 1 and flags[i + 1, j] == _KNOWN:
            acc0 += img[i + 1, j, 0]; acc1 += img[i + 1, j, 1]; acc2 += img[i + 1, j, 2]; n += 1.0
        wsum = n if n > 0.0 else 1.0

    out[0] = acc0 / wsum
    out[1] = acc1 / wsum
    out[2] = acc2 / wsum
    for c in range(3):
        if out[c] < 0.0:
            out[c] = 0.0
        elif out[c] > 255.0:
            out[c] = 255.0


@njit(cache=True)
def _fmm_fill(img, mask, radius, order_idx, order_t):
    h, w = mask.shape
    flags = np.empty((h, w), dtype=np.uint8)
    T = np.empty((h, w), dtype=np.float64)
    n_inside = 0
    for i in range(h):
        for j in range(w):
            if mask[i, j] != 0:
                flags[i, j] = _INSIDE
                T[i, j] = _FAR
                n_inside += 1
            else:
                flags[i, j] = _KNOWN
                T[i, j] = 0.0

    cap = 8 * n_inside + 16
    heap_t = np.empty(cap, dtype=np.float64)
    heap_i = np.empty(cap, dtype=np.int64)
    size = 0

    # Seed the band: inside pixels 4-adjacent to known ones.
    for i in range(h):
        for j in range(w):
            if flags[i, j] != _INSIDE:
                continue
            t = _solve_eikonal(T, flags, i, j, h, w)
            if t < _FAR:
                T[i, j] = t
                flags[i, j] = _BAND
                size = _heap_push(heap_t, heap_i, size, t, i * w + j)

    est = np.empty(3, dtype=np.float64)
    filled = 0
    while size > 0:
        t, idx, size = _heap_pop(heap_t, heap_i, size)
        i = idx // w
        j = idx % w
        if flags[i, j] != _BAND or T[i, j] != t:
            continue  # stale heap entry
        _estimate_pixel(img, T, flags, i, j, t, radius, est)
        for c in range(3):
            img[i, j, c] = np.uint8(est[c] + 0.5)
        flags[i, j] = _KNOWN
        order_idx[filled] = idx
        order_t[filled] = t
        filled += 1

        for k in range(4):
            ni = i + (-1 if k == 0 else 1 if k == 1 else 0)
            nj = j + (-1 if k == 2 else 1 if k == 3 else 0)
            if ni < 0 or ni >= h or nj < 0 or nj >= w:
                continue
            if flags[ni, nj] == _KNOWN:
                continue
            t_new = _solve_eikonal(T, flags, ni, nj, h, w)
            if t_new < T[ni, nj]:
                T[ni, nj] = t_new
                flags[ni, nj] = _BAND
                if size >= cap:
                    # Compact stale entries would be ideal; capacity is sized
                    # generously so this is unreachable in practice.
                    continue
                size = _heap_push(heap_t, heap_i, size, t_new, ni * w + nj)

    return filled


def inpaint_traced(image: np.ndarray, mask: np.ndarray, params: InpaintParams = InpaintParams()):
    """Like inpaint, but also returns the fill trace.

    Returns (output, order_idx, order_t, distance_like) where order_idx /
    order_t list the row-major index and boundary distance of each fill in
    the order pixels were finalized. Used to assert monotone fill order.
    """
    check_image(image)
    try:
        check_mask(mask, image)
    except Exception as exc:
        raise InpaintError(str(exc)) from exc
    n_inside = int(np.count_nonzero(mask == MASK_INPAINT))
    if n_inside == mask.size:
        raise InpaintError("mask covers the entire image; no boundary information")
    out = image.copy()
    order_idx = np.empty(n_inside, dtype=np.int64)
    order_t = np.empty(n_inside, dtype=np.float64)
    filled = _fmm_fill(out, mask, int(params.radius), order_idx, order_t)
    assert filled == n_inside
    return out, order_idx, order_t


def inpaint(image: np.ndarray, mask: np.ndarray, params: InpaintParams = InpaintParams()) -> np.ndarray:
    """Fill the masked region of an RGB image; unmasked pixels pass through
    byte-identical. Output is freshly allocated, input untouched."""
    out, _, _ = inpaint_traced(image, mask, params)
    return out
