"""Walk the classic chaos game over a protein sequence.

Each residue pulls the current point halfway toward that residue's fixed
anchor in the unit square; the resulting cloud of points is the chaos-game
representation. Binning the cloud gives the frequency grid used as a
baseline feature matrix.

Run from the repository root:

    python3 demos/cgr_baseline.py
"""

from pathlib import Path

from dance import cgr_walk, fcgr_grid, rasterize_points, write_pgm
from dance.rng import SplitMix64
from dance.seqdata import ALPHABET

OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    rng = SplitMix64(2024)
    seq = "".join(rng.choice(ALPHABET) for _ in range(2000))

    walk = cgr_walk(seq)
    print(f"walked {len(walk)} steps; all points stay in the unit square:")
    print(f"  min {walk.points.min():.6f}  max {walk.points.max():.6f}")

    grid = fcgr_grid(walk, resolution=8)
    assert grid.counts.sum() == len(seq)
    print("8x8 frequency grid (counts, top row = high y):")
    for row in grid.counts[::-1]:
        print("  " + " ".join(f"{c:4d}" for c in row))

    img = rasterize_points(walk.points, 380, 380)
    with open(OUT / "cgr_walk.pgm", "wb") as fh:
        write_pgm(img, fh)
    print(f"wrote point-cloud raster to {OUT / 'cgr_walk.pgm'}")


if __name__ == "__main__":
    main()
