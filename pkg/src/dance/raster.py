"""Deterministic grayscale rasterization of segment sets and point walks.

World coordinates are mapped to a half-pixel integer grid (two units per
pixel) with round-half-away-from-zero applied to the signed offset from the
horizontal axis, then segments are traced with an exact integer supercover.
The vertical window is always symmetric about v = 0, so the geometric mirror
symmetry of kaleidoscope output survives to the pixel level byte-for-byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import ink_segment, ink_segments
from .errors import ConfigError, DataError
from .kaleidoscope import SegmentSet

BACKGROUND = 255
INK = 0

DEFAULT_SIZE = 380
DEFAULT_PAD = 0.05


@dataclass(frozen=True)
class Viewport:
    """World window plus pixel dimensions; v_min == -v_max always holds."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise ConfigError("viewport window is empty")
        if self.v_min != -self.v_max:
            raise ConfigError("viewport must be vertically symmetric")
        if self.width < 1 or self.height < 1:
            raise ConfigError("pixel dimensions must be positive")

    def world_to_grid(self, u, v):
        """Map world coordinates to half-pixel integers (vectorized).

        Columns count from the left edge; rows from the top, with the
        v = 0 axis landing exactly on the grid value `height`.
        """
        kx = 2.0 * self.width / (self.u_max - self.u_min)
        ky = 2.0 * self.height / (self.v_max - self.v_min)
        gx = _round_half_away(np.asarray(u, dtype=np.float64) * kx
                              - self.u_min * kx)
        gy = self.height - _round_half_away(np.asarray(v, dtype=np.float64) * ky)
        return gx.astype(np.int64), gy.astype(np.int64)


def _round_half_away(x: np.ndarray) -> np.ndarray:
    """Round half away from zero; odd function, exact for signed zeros."""
    f = np.floor(np.abs(x) + 0.5)
    return np.where(x >= 0, f, -f)


@dataclass
class RasterImage:
    """Fixed-size 8-bit grayscale image; 0 is ink, 255 background."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width) uint8
    viewport: Viewport

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width):
            raise ConfigError("pixel buffer shape mismatch")

    @classmethod
    def blank(cls, viewport: Viewport) -> "RasterImage":
        pixels = np.full((viewport.height, viewport.width), BACKGROUND, np.uint8)
        return cls(viewport.width, viewport.height, pixels, viewport)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RasterImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


def _endpoint_array(segments) -> np.ndarray:
    if isinstance(segments, SegmentSet):
        return segments.array
    return np.asarray(segments, dtype=np.float64).reshape(-1, 4)


def fit_viewport(
    segments,
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    pad_fraction: float = DEFAULT_PAD,
) -> Viewport:
    """Fit a symmetric viewport around all segment endpoints.

    Bounding box, expanded by pad_fraction of each half-extent per side,
    vertical extent symmetrized to v_max = max(|v|), then one axis widened
    (never shrunk) about its center to match the pixel aspect ratio.
    Degenerate extents expand to a unit window around the point.
    """
    arr = _endpoint_array(segments)
    if arr.shape[0] == 0:
        raise DataError("cannot fit a viewport to an empty segment set")
    if pad_fraction < 0:
        raise ConfigError("pad_fraction must be >= 0")
    us = np.concatenate([arr[:, 0], arr[:, 2]])
    vs = np.concatenate([arr[:, 1], arr[:, 3]])
    u_min, u_max = float(us.min()), float(us.max())
    v_min, v_max = float(vs.min()), float(vs.max())

    cu, hu = (u_min + u_max) / 2.0, (u_max - u_min) / 2.0
    cv, hv = (v_min + v_max) / 2.0, (v_max - v_min) / 2.0
    hu *= 1.0 + pad_fraction
    hv *= 1.0 + pad_fraction
    if hu == 0.0:
        hu = 0.5
    if hv == 0.0:
        hv = 0.5
    u_min, u_max = cu - hu, cu + hu
    v_top = max(abs(cv - hv), abs(cv + hv))

    # Widen one axis about its center to match width/height exactly.
    aspect = width / height
    u_extent = u_max - u_min
    v_extent = 2.0 * v_top
    if u_extent < aspect * v_extent:
        half = aspect * v_extent / 2.0
        u_min, u_max = cu - half, cu + half
    elif u_extent > aspect * v_extent:
        v_top = u_extent / aspect / 2.0
    return Viewport(u_min, u_max, -v_top, v_top, width, height)


def draw_segment(image: RasterImage, a, b, ink: int = INK) -> RasterImage:
    """Ink all pixels touched by the segment; clips to image bounds."""
    gx, gy = image.viewport.world_to_grid(
        np.array([a[0], b[0]]), np.array([a[1], b[1]])
    )
    ink_segment(image.pixels, gx[0], gy[0], gx[1], gy[1], np.uint8(ink))
    return image


def rasterize(
    segments,
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    pad_fraction: float = DEFAULT_PAD,
    ink: int = INK,
    viewport: Viewport | None = None,
) -> RasterImage:
    """Fit a viewport (unless given) and draw every segment. Deterministic."""
    arr = _endpoint_array(segments)
    if viewport is None:
        viewport = fit_viewport(arr, width, height, pad_fraction)
    image = RasterImage.blank(viewport)
    if arr.shape[0]:
        gx1, gy1 = viewport.world_to_grid(arr[:, 0], arr[:, 1])
        gx2, gy2 = viewport.world_to_grid(arr[:, 2], arr[:, 3])
        ink_segments(image.pixels, gx1, gy1, gx2, gy2, np.uint8(ink))
    return image


def rasterize_points(
    points,
    width: int = DEFAULT_SIZE,
    height: int = DEFAULT_SIZE,
    pad_fraction: float = DEFAULT_PAD,
    ink: int = INK,
) -> RasterImage:
    """Plot each point as a single dot (zero-length segment)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise DataError("cannot rasterize an empty point set")
    segs = np.hstack([pts, pts])
    return rasterize(segs, width, height, pad_fraction, ink)


def write_pgm(image: RasterImage, sink) -> int:
    """Write binary PGM (P5); bit-exact for a given image."""
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    payload = image.pixels.tobytes()
    sink.write(header)
    sink.write(payload)
    return len(header) + len(payload)


def pgm_bytes(image: RasterImage) -> bytes:
    import io

    buf = io.BytesIO()
    write_pgm(image, buf)
    return buf.getvalue()


def read_pgm(source) -> tuple[int, int, np.ndarray]:
    """Read binary PGM; returns (width, height, pixels)."""
    data = source.read() if hasattr(source, "read") else bytes(source)
    if not data.startswith(b"P5"):
        raise DataError("not a binary PGM (missing P5 magic)")
    # Header: magic, width, height, maxval, single whitespace, then payload.
    fields: list[int] = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(int(data[start:pos]))
    pos += 1  # the single whitespace after maxval
    width, height, maxval = fields
    if maxval != 255:
        raise DataError("only 8-bit PGM supported")
    payload = data[pos : pos + width * height]
    if len(payload) != width * height:
        raise DataError("truncated PGM payload")
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return width, height, pixels.copy()


def write_png(image: RasterImage, sink) -> int:
    """Write an 8-bit grayscale PNG decoding to the same pixel matrix."""
    from PIL import Image

    start = sink.tell() if hasattr(sink, "tell") else None
    Image.fromarray(image.pixels, mode="L").save(sink, format="PNG")
    if start is not None:
        return sink.tell() - start
    return 0


def read_png(source) -> tuple[int, int, np.ndarray]:
    from PIL import Image

    img = Image.open(source)
    if img.mode != "L":
        img = img.convert("L")
    pixels = np.asarray(img, dtype=np.uint8)
    return img.width, img.height, pixels
