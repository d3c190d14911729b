"""Render one sequence at several recursion depths.

The kaleidoscope construction draws four mirrored segments per residue and
re-seeds itself at four mirror images of the current anchor, so the image
density grows five-fold per depth level. This script renders the sample
sequence at depths 1 through 4 and writes the images next to a small table
of segment counts.

Run from the repository root:

    python3 demos/kaleidoscope_gallery.py
"""

from pathlib import Path

from dance import (
    KaleidoscopeParams,
    generate_kaleidoscope,
    rasterize,
    segment_count_oracle,
    write_pgm,
    write_png,
)

SEQ = "ACQRSTAGTACGT"
OUT = Path(__file__).parent / "out"


def main():
    OUT.mkdir(exist_ok=True)
    print(f"sequence: {SEQ} (length {len(SEQ)})")
    print(f"{'depth':>5}  {'segments':>8}  {'closed form':>11}")
    for depth in range(1, 5):
        segs = generate_kaleidoscope(SEQ, KaleidoscopeParams(depth=depth))
        closed = 4 * len(SEQ) * 5 ** (depth - 1)
        assert len(segs) == segment_count_oracle(len(SEQ), depth) == closed
        print(f"{depth:>5}  {len(segs):>8}  {closed:>11}")
        img = rasterize(segs)
        with open(OUT / f"gallery_depth{depth}.pgm", "wb") as fh:
            write_pgm(img, fh)
        with open(OUT / f"gallery_depth{depth}.png", "wb") as fh:
            write_png(img, fh)
    print(f"wrote 8 images to {OUT}")


if __name__ == "__main__":
    main()
