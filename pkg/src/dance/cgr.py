"""Classic chaos-game-representation baseline: midpoint walk + frequency grid."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .kaleidoscope import coordinate_rule
from .seqdata import ProteinSequence

#: Centroid of the unit square, the conventional central seed point.
DEFAULT_START = (0.5, 0.5)


@dataclass(frozen=True)
class CgrWalk:
    """Ordered walk points in the unit square, one per residue."""

    points: np.ndarray  # (L, 2) float64
    start: tuple[float, float] = DEFAULT_START

    def __post_init__(self):
        object.__setattr__(
            self, "points", np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        )

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class FcgrGrid:
    """Frequency grid of walk points; counts sum to the sequence length."""

    resolution: int
    counts: np.ndarray  # (r, r) int64, [row = y bin][col = x bin]

    def __post_init__(self):
        if self.resolution < 1:
            raise ConfigError("resolution must be >= 1")
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.resolution, self.resolution):
            raise ConfigError("counts shape must be resolution x resolution")
        object.__setattr__(self, "counts", counts)

    def to_csv(self) -> str:
        """Row-major CSV, one line per grid row (low-y row first)."""
        buf = io.StringIO()
        for row in self.counts:
            buf.write(",".join(str(int(v)) for v in row))
            buf.write("\n")
        return buf.getvalue()


def cgr_walk(
    seq: ProteinSequence | str,
    table: dict[str, tuple[float, float]] | None = None,
    start: tuple[float, float] = DEFAULT_START,
    ratio: float = 0.5,
) -> CgrWalk:
    """Chaos-game walk: each step moves `ratio` of the way to the residue's
    table point. The default ratio 0.5 is the classic midpoint rule.
    """
    if not 0.0 < ratio < 1.0:
        raise ConfigError("ratio must be in (0, 1)")
    if not (0.0 <= start[0] <= 1.0 and 0.0 <= start[1] <= 1.0):
        raise ConfigError("start point must lie in the unit square")
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    x, y = start
    pts = np.empty((len(residues), 2), dtype=np.float64)
    for i, res in enumerate(residues):
        cx, cy = coordinate_rule(res, table)
        x = x + (cx - x) * ratio
        y = y + (cy - y) * ratio
        pts[i, 0] = x
        pts[i, 1] = y
    return CgrWalk(pts, start)


def fcgr_grid(walk: CgrWalk, resolution: int) -> FcgrGrid:
    """Histogram the walk into an r x r grid; boundary points clamp inward."""
    if resolution < 1:
        raise ConfigError("resolution must be >= 1")
    counts = np.zeros((resolution, resolution), dtype=np.int64)
    if len(walk):
        ix = np.minimum(
            np.floor(walk.points[:, 0] * resolution).astype(np.int64), resolution - 1
        )
        iy = np.minimum(
            np.floor(walk.points[:, 1] * resolution).astype(np.int64), resolution - 1
        )
        np.add.at(counts, (iy, ix), 1)
    return FcgrGrid(resolution, counts)
