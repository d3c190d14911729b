import io
from fractions import Fraction

import numpy as np
import pytest

from dance import (
    DataError,
    KaleidoscopeParams,
    RasterImage,
    Viewport,
    draw_segment,
    fit_viewport,
    generate_kaleidoscope,
    pgm_bytes,
    rasterize,
    rasterize_points,
    read_pgm,
    read_png,
    write_pgm,
    write_png,
)
from dance._kernels import ink_segment
from dance.errors import ConfigError
from dance.rng import SplitMix64


def segment_touches_box(x1, y1, x2, y2, bx0, by0, bx1, by1):
    """Exact test: does the closed segment intersect the closed box?

    Integer endpoints, exact rational clipping (Liang-Barsky).
    """
    t0, t1 = Fraction(0), Fraction(1)
    dx, dy = x2 - x1, y2 - y1
    for p, q in (
        (-dx, x1 - bx0),
        (dx, bx1 - x1),
        (-dy, y1 - by0),
        (dy, by1 - y1),
    ):
        if p == 0:
            if q < 0:
                return False
        else:
            t = Fraction(q, p)
            if p < 0:
                if t > t1:
                    return False
                if t > t0:
                    t0 = t
            else:
                if t < t0:
                    return False
                if t < t1:
                    t1 = t
    return t0 <= t1


def supercover_oracle(h, w, x1, y1, x2, y2):
    """Brute-force per-pixel oracle: ink pixel (r, c) iff the segment touches
    its closed half-grid square [2c, 2c+2] x [2r, 2r+2]."""
    img = np.full((h, w), 255, np.uint8)
    for r in range(h):
        for c in range(w):
            if segment_touches_box(
                x1, y1, x2, y2, 2 * c, 2 * r, 2 * c + 2, 2 * r + 2
            ):
                img[r, c] = 0
    return img


def kernel_image(h, w, x1, y1, x2, y2):
    img = np.full((h, w), 255, np.uint8)
    ink_segment(img, x1, y1, x2, y2, np.uint8(0))
    return img


class TestInkSegmentKernel:
    def test_matches_supercover_oracle_random(self):
        rng = SplitMix64(17)
        h = w = 12
        for _ in range(50):
            x1, x2 = rng.randint(-2, 2 * w + 2), rng.randint(-2, 2 * w + 2)
            y1, y2 = rng.randint(-2, 2 * h + 2), rng.randint(-2, 2 * h + 2)
            got = kernel_image(h, w, x1, y1, x2, y2)
            want = supercover_oracle(h, w, x1, y1, x2, y2)
            assert np.array_equal(got, want), (x1, y1, x2, y2)

    def test_boundary_segment_inks_both_rows(self):
        # a segment exactly on a pixel-row boundary touches both rows
        img = kernel_image(4, 4, 0, 4, 8, 4)
        assert np.array_equal((img == 0).sum(axis=1), [0, 4, 4, 0])

    def test_point_on_corner_inks_four_pixels(self):
        img = kernel_image(4, 4, 4, 4, 4, 4)
        assert (img == 0).sum() == 4

    def test_outside_clipped(self):
        img = kernel_image(4, 4, 20, 20, 30, 30)
        assert (img == 255).all()


class TestFitViewport:
    def segs(self, coords):
        return np.asarray(coords, dtype=np.float64).reshape(-1, 4)

    def test_hand_example(self):
        vp = fit_viewport(
            self.segs([[-10, -0.5, 10, 0.5]]), 380, 380, pad_fraction=0.05
        )
        assert (vp.u_min, vp.u_max) == (-10.5, 10.5)
        assert (vp.v_min, vp.v_max) == (-10.5, 10.5)

    def test_degenerate_point(self):
        vp = fit_viewport(self.segs([[0, 0, 0, 0]]), 380, 380, 0.05)
        assert (vp.u_min, vp.u_max) == (-0.5, 0.5)
        assert (vp.v_min, vp.v_max) == (-0.5, 0.5)

    def test_always_symmetric(self):
        rng = SplitMix64(23)
        for _ in range(20):
            arr = np.array(
                [[rng.uniform() * 10 - 3, rng.uniform() * 7 + 1,
                  rng.uniform() * 5, rng.uniform() * 2 - 4]
                 for _ in range(5)]
            )
            vp = fit_viewport(arr, 190, 380, 0.05)
            assert vp.v_min == -vp.v_max
            assert vp.u_max - vp.u_min == pytest.approx(
                (vp.v_max - vp.v_min) * 190 / 380
            )

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            fit_viewport(np.empty((0, 4)))


class TestDrawAndRasterize:
    def test_horizontal_segment_inks_full_row(self):
        vp = Viewport(-10.0, 10.0, -10.0, 10.0, 20, 20)
        img = RasterImage.blank(vp)
        # v = 5.25 sits strictly inside a pixel row
        draw_segment(img, (-10.0, 5.25), (10.0, 5.25))
        rows = (img.pixels == 0).sum(axis=1)
        assert rows.max() == 20 and (rows > 0).sum() == 1

    def test_fully_outside_unchanged(self):
        vp = Viewport(-1.0, 1.0, -1.0, 1.0, 10, 10)
        img = RasterImage.blank(vp)
        draw_segment(img, (5.0, 5.0), (6.0, 6.0))
        assert (img.pixels == 255).all()

    def test_mirror_commutation(self):
        vp = Viewport(-2.0, 2.0, -2.0, 2.0, 50, 50)
        rng = SplitMix64(31)
        for _ in range(50):
            a = (rng.uniform() * 4 - 2, rng.uniform() * 4 - 2)
            b = (rng.uniform() * 4 - 2, rng.uniform() * 4 - 2)
            img = RasterImage.blank(vp)
            draw_segment(img, a, b)
            mirrored = RasterImage.blank(vp)
            draw_segment(mirrored, (a[0], -a[1]), (b[0], -b[1]))
            assert np.array_equal(mirrored.pixels, img.pixels[::-1])

    def test_idempotent_and_monotone(self):
        segs = generate_kaleidoscope("ACD", KaleidoscopeParams(depth=2))
        once = rasterize(segs, 64, 64)
        twice = rasterize(
            np.vstack([segs.array, segs.array]), 64, 64,
            viewport=once.viewport,
        )
        assert once == twice
        fewer = rasterize(segs.array[:20], 64, 64, viewport=once.viewport)
        # adding segments never un-inks a pixel
        assert np.all(once.pixels <= fewer.pixels)

    def test_single_residue_image_mirror(self):
        segs = generate_kaleidoscope("A", KaleidoscopeParams(depth=1))
        img = rasterize(segs)
        assert np.array_equal(img.pixels, img.pixels[::-1])
        assert (img.pixels == 0).any()

    def test_deterministic_bytes(self):
        segs = generate_kaleidoscope("ACQRSTAGTACGT")
        a = pgm_bytes(rasterize(segs))
        b = pgm_bytes(rasterize(segs))
        assert a == b

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            rasterize(np.empty((0, 4)))

    def test_points_rendering(self):
        img = rasterize_points(np.array([[0.5, 0.5], [0.25, 0.75]]), 64, 64)
        assert (img.pixels == 0).any()


class TestFormats:
    def make_image(self, pixels):
        pixels = np.asarray(pixels, np.uint8)
        h, w = pixels.shape
        vp = Viewport(0.0, float(w), -float(h) / 2, float(h) / 2, w, h)
        return RasterImage(w, h, pixels, vp)

    def test_pgm_golden_1x1(self):
        img = self.make_image([[255]])
        assert pgm_bytes(img) == b"P5\n1 1\n255\n\xff"

    def test_pgm_golden_2x1(self):
        img = self.make_image([[0, 255]])
        assert pgm_bytes(img) == b"P5\n2 1\n255\n\x00\xff"

    def test_pgm_round_trip(self):
        img = rasterize(generate_kaleidoscope("ACD", KaleidoscopeParams(depth=2)), 64, 64)
        w, h, pixels = read_pgm(pgm_bytes(img))
        assert (w, h) == (64, 64)
        assert np.array_equal(pixels, img.pixels)

    def test_png_decode_equality(self):
        img = rasterize(generate_kaleidoscope("WYA", KaleidoscopeParams(depth=2)), 64, 64)
        buf = io.BytesIO()
        write_png(img, buf)
        buf.seek(0)
        w, h, pixels = read_png(buf)
        assert (w, h) == (64, 64)
        assert np.array_equal(pixels, img.pixels)

    def test_bad_pgm(self):
        with pytest.raises(DataError):
            read_pgm(b"P6\n1 1\n255\nxxx")


class TestViewport:
    def test_invariants(self):
        with pytest.raises(ConfigError):
            Viewport(0.0, 1.0, -1.0, 2.0, 10, 10)
        with pytest.raises(ConfigError):
            Viewport(1.0, 0.0, -1.0, 1.0, 10, 10)
