"""Numba kernels for segment rasterization.

Segments arrive as integer endpoints on a half-pixel grid (two units per
pixel, even values on pixel boundaries). A pixel is inked when the segment
touches its closed square. All arithmetic is integer, so the inked set is
exactly equivariant under the vertical flip y -> 2H - y of the half-pixel
grid: reflected segments produce reflected pixel sets, bit for bit.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def _ink_rows(pixels, c, ya_num, yb_num, den, ink):
    # Ink rows r whose doubled span [2r, 2r+2] (times den) meets
    # [ya_num, yb_num]; den > 0. Exactly-on-boundary values touch both sides.
    h = pixels.shape[0]
    two_den = 2 * den
    q = ya_num // two_den
    if ya_num % two_den == 0:
        r_lo = q - 1
    else:
        r_lo = q
    r_hi = yb_num // two_den
    if r_lo < 0:
        r_lo = 0
    if r_hi > h - 1:
        r_hi = h - 1
    for r in range(r_lo, r_hi + 1):
        pixels[r, c] = ink


@numba.njit(cache=True)
def ink_segment(pixels, x1, y1, x2, y2, ink):
    """Ink every pixel whose closed square the segment touches.

    Coordinates are half-pixel integers; pixel (r, c) spans
    [2c, 2c+2] x [2r, 2r+2]. Out-of-range pixels are clipped.
    """
    h, w = pixels.shape
    if x1 > x2:
        x1, x2 = x2, x1
        y1, y2 = y2, y1
    dx = x2 - x1
    dy = y2 - y1

    if dx == 0:
        # Vertical (or degenerate) segment: one or two columns.
        if x1 % 2 == 0:
            c_lo = x1 // 2 - 1
        else:
            c_lo = x1 // 2
        c_hi = x1 // 2
        ya = min(y1, y2)
        yb = max(y1, y2)
        for c in range(max(c_lo, 0), min(c_hi, w - 1) + 1):
            _ink_rows(pixels, c, ya, yb, 1, ink)
        return

    if x1 % 2 == 0:
        c_lo = x1 // 2 - 1
    else:
        c_lo = x1 // 2
    c_hi = x2 // 2
    if c_lo < 0:
        c_lo = 0
    if c_hi > w - 1:
        c_hi = w - 1
    for c in range(c_lo, c_hi + 1):
        xa = max(x1, 2 * c)
        xb = min(x2, 2 * c + 2)
        if xa > xb:
            continue
        # y values at the strip edges, as exact rationals over dx.
        ya_num = y1 * dx + (xa - x1) * dy
        yb_num = y1 * dx + (xb - x1) * dy
        if ya_num > yb_num:
            ya_num, yb_num = yb_num, ya_num
        _ink_rows(pixels, c, ya_num, yb_num, dx, ink)


@numba.njit(cache=True)
def ink_segments(pixels, xs1, ys1, xs2, ys2, ink):
    """Rasterize a batch of half-pixel-grid segments into one image."""
    for i in range(xs1.shape[0]):
        ink_segment(pixels, xs1[i], ys1[i], xs2[i], ys2[i], ink)
