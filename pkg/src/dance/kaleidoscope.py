"""Kaleidoscopic segment generation for protein sequences.

Each residue has a fixed anchor point in the unit square (COORDINATE_TABLE).
Generation walks a moving point along a fixed step vector, draws four
mirrored segments from the walk position to the residue's table point, and
recursively re-seeds the walk at the four sign combinations of the current
position with a shrinking recursion budget. The output is an ordered multiset
of line segments in world coordinates; rasterization is a separate module so
tests can assert exact segment-level properties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .seqdata import ProteinSequence

#: Default residue -> (x, y) coordinates. All 20 pairs are distinct.
COORDINATE_TABLE: dict[str, tuple[float, float]] = {
    "A": (0.5, 0.5),
    "C": (1.0, 0.5),
    "D": (0.5, 1.0),
    "E": (0.0, 0.5),
    "F": (1.0, 1.0),
    "G": (0.25, 0.25),
    "H": (0.75, 0.25),
    "I": (0.75, 0.75),
    "K": (0.25, 0.75),
    "L": (0.75, 0.0),
    "M": (0.5, 0.0),
    "N": (0.25, 0.5),
    "P": (1.0, 0.0),
    "Q": (0.0, 1.0),
    "R": (0.5, 0.25),
    "S": (0.75, 0.5),
    "T": (0.5, 0.75),
    "V": (0.0, 0.0),
    "W": (1.0, 0.25),
    "Y": (1.0, 0.75),
}

#: Hard cap on recursion depth. Work grows as 5^(depth-1); 12 keeps the
#: worst case around 1e8 calls.
MAX_DEPTH = 12


def validate_table(table: dict[str, tuple[float, float]]) -> None:
    if set(table) != set(COORDINATE_TABLE):
        raise ConfigError("coordinate table must cover exactly the 20 residues")
    points = list(table.values())
    if len(set(points)) != len(points):
        raise ConfigError("coordinate table points must be pairwise distinct")
    for res, (cx, cy) in table.items():
        if not (0.0 <= cx <= 1.0 and 0.0 <= cy <= 1.0):
            raise ConfigError(f"table entry for {res!r} outside the unit square")


def coordinate_rule(
    residue: str, table: dict[str, tuple[float, float]] | None = None
) -> tuple[float, float]:
    """Look up a residue's table point."""
    table = COORDINATE_TABLE if table is None else table
    try:
        return table[residue]
    except KeyError:
        raise DataError(f"unknown residue {residue!r}") from None


@dataclass(frozen=True)
class KaleidoscopeParams:
    """Generation parameters; the defaults are the tuned reference values."""

    depth: int = 4
    pos: tuple[float, float] = (0.0, 0.0)
    angle: float = 0.0
    scale: float = 10.0

    def __post_init__(self):
        if self.depth < 0:
            raise ConfigError("depth must be >= 0")
        if self.depth > MAX_DEPTH:
            raise ConfigError(f"depth {self.depth} exceeds the guard ({MAX_DEPTH})")
        if not self.scale > 0:
            raise ConfigError("scale must be positive")


class SegmentSet:
    """Ordered multiset of 2-D segments, stored as an (N, 4) float64 array.

    Row layout is (x1, y1, x2, y2). Emission order is preserved and
    duplicates are kept.
    """

    __slots__ = ("array",)

    def __init__(self, array: np.ndarray):
        arr = np.asarray(array, dtype=np.float64).reshape(-1, 4)
        if not np.all(np.isfinite(arr)):
            raise DataError("segment coordinates must be finite")
        self.array = arr

    def __len__(self) -> int:
        return self.array.shape[0]

    def __iter__(self):
        for row in self.array:
            yield ((row[0], row[1]), (row[2], row[3]))

    def __eq__(self, other) -> bool:
        return isinstance(other, SegmentSet) and np.array_equal(
            self.array, other.array
        )

    def dumps(self) -> str:
        """One segment per line, 'x1 y1 x2 y2', 17 significant digits."""
        lines = [
            "%.17g %.17g %.17g %.17g" % tuple(row) for row in self.array
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def loads(cls, text: str) -> "SegmentSet":
        rows = [
            [float(tok) for tok in line.split()]
            for line in text.splitlines()
            if line.strip()
        ]
        for row in rows:
            if len(row) != 4:
                raise DataError("segment dump lines must have 4 fields")
        return cls(np.array(rows, dtype=np.float64).reshape(-1, 4))


def _generate(points, depth, px, py, dx, dy, out):
    # One call of the recursive generator. `depth` is mutated inside the
    # loop, so the i-th iteration recurses with entry-depth - i.
    if depth <= 0:
        return
    x, y = px, py
    d = depth
    for cx, cy in points:
        x += dx
        y += dy
        out.append((x, y, cx, cy))
        out.append((x, y, cx, -cy))
        out.append((-x, -y, cx, cy))
        out.append((-x, -y, cx, -cy))
        if d > 1:
            _generate(points, d - 1, x, y, dx, dy, out)
            _generate(points, d - 1, x, -y, dx, dy, out)
            _generate(points, d - 1, -x, y, dx, dy, out)
            _generate(points, d - 1, -x, -y, dx, dy, out)
        d -= 1


def generate_kaleidoscope(
    seq: ProteinSequence | str,
    params: KaleidoscopeParams | None = None,
    table: dict[str, tuple[float, float]] | None = None,
) -> SegmentSet:
    """Produce the ordered segment multiset for a sequence.

    Deterministic: identical inputs give bit-identical output arrays.
    """
    params = params or KaleidoscopeParams()
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    points = [coordinate_rule(r, table) for r in residues]
    dx = params.scale * math.cos(params.angle)
    dy = params.scale * math.sin(params.angle)
    out: list[tuple[float, float, float, float]] = []
    _generate(points, params.depth, params.pos[0], params.pos[1], dx, dy, out)
    arr = np.array(out, dtype=np.float64).reshape(-1, 4)
    return SegmentSet(arr)


def segment_count_oracle(length: int, depth: int) -> int:
    """Exact segment count of generate_kaleidoscope, computed independently.

    Active calls satisfy C(d) = 1 + 4 * sum_{i=1..L} C(d - i) with C(k) = 0
    for k <= 0; every active call emits 4L segments. For L >= depth - 1 this
    closes to 4 * L * 5**(depth - 1).
    """
    if length < 0 or depth < 0:
        raise ConfigError("length and depth must be nonnegative")
    cache: dict[int, int] = {}

    def calls(d: int) -> int:
        if d <= 0:
            return 0
        if d in cache:
            return cache[d]
        total = 1 + 4 * sum(calls(d - i) for i in range(1, length + 1))
        cache[d] = total
        return total

    return 4 * length * calls(depth)
