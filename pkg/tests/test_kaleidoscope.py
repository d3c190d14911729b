import numpy as np
import pytest

from dance import (
    COORDINATE_TABLE,
    DataError,
    KaleidoscopeParams,
    SegmentSet,
    coordinate_rule,
    generate_kaleidoscope,
    segment_count_oracle,
)
from dance.errors import ConfigError
from dance.rng import SplitMix64
from dance.seqdata import ALPHABET


def random_sequence(rng, length):
    return "".join(rng.choice(ALPHABET) for _ in range(length))


def brute_force_trace(residues, depth, pos, angle, scale, table):
    """Literal transcription of the recursive pseudocode, kept independent
    of the library implementation."""
    import math

    out = []

    def gen(depth, pos):
        if depth <= 0:
            return
        x, y = pos
        dx = scale * math.cos(angle)
        dy = scale * math.sin(angle)
        for residue in residues:
            x, y = x + dx, y + dy
            cx, cy = table[residue]
            out.append((x, y, cx, cy))
            out.append((x, y, cx, -cy))
            out.append((-x, -y, cx, cy))
            out.append((-x, -y, cx, -cy))
            gen(depth - 1, (x, y))
            gen(depth - 1, (x, -y))
            gen(depth - 1, (-x, y))
            gen(depth - 1, (-x, -y))
            depth = depth - 1

    gen(depth, pos)
    return out


class TestCoordinateTable:
    def test_exact_contents(self):
        assert COORDINATE_TABLE["A"] == (0.5, 0.5)
        assert COORDINATE_TABLE["V"] == (0.0, 0.0)
        assert COORDINATE_TABLE["Q"] == (0.0, 1.0)
        assert COORDINATE_TABLE["Y"] == (1.0, 0.75)
        assert len(COORDINATE_TABLE) == 20
        assert len(set(COORDINATE_TABLE.values())) == 20

    def test_coordinate_rule(self):
        assert coordinate_rule("A") == (0.5, 0.5)
        assert coordinate_rule("V") == (0.0, 0.0)

    def test_unknown_residue(self):
        with pytest.raises(DataError):
            coordinate_rule("Z")


class TestGenerate:
    def test_depth_zero_empty(self):
        assert len(generate_kaleidoscope("ACDE", KaleidoscopeParams(depth=0))) == 0

    def test_empty_sequence_empty(self):
        assert len(generate_kaleidoscope("", KaleidoscopeParams(depth=4))) == 0

    def test_single_residue_hand_trace(self):
        segs = generate_kaleidoscope("A", KaleidoscopeParams(depth=1))
        expected = np.array(
            [
                [10.0, 0.0, 0.5, 0.5],
                [10.0, 0.0, 0.5, -0.5],
                [-10.0, 0.0, 0.5, 0.5],
                [-10.0, 0.0, 0.5, -0.5],
            ]
        )
        assert np.array_equal(segs.array, expected)

    def test_figure_sequence_count(self):
        segs = generate_kaleidoscope("ACQRSTAGTACGT")
        assert len(segs) == 6500

    def test_matches_literal_pseudocode_trace(self):
        rng = SplitMix64(11)
        for _ in range(10):
            seq = random_sequence(rng, rng.randint(1, 8))
            depth = rng.randint(1, 3)
            params = KaleidoscopeParams(depth=depth, pos=(1.0, 2.0), angle=0.3)
            got = generate_kaleidoscope(seq, params).array
            want = np.array(
                brute_force_trace(
                    seq, depth, (1.0, 2.0), 0.3, 10.0, COORDINATE_TABLE
                )
            ).reshape(-1, 4)
            assert np.array_equal(got, want)

    def test_determinism_bit_for_bit(self):
        a = generate_kaleidoscope("ACQRSTAGTACGT").array
        b = generate_kaleidoscope("ACQRSTAGTACGT").array
        assert np.array_equal(a, b)

    def test_depth_guard(self):
        with pytest.raises(ConfigError):
            KaleidoscopeParams(depth=13)

    def test_bad_scale(self):
        with pytest.raises(ConfigError):
            KaleidoscopeParams(scale=0.0)


class TestCountOracle:
    def test_figure_value(self):
        assert segment_count_oracle(13, 4) == 6500 == 4 * 13 * 125

    def test_depth_one(self):
        for length in range(0, 30):
            assert segment_count_oracle(length, 1) == 4 * length

    def test_zero_length(self):
        for depth in range(0, 8):
            assert segment_count_oracle(0, depth) == 0

    def test_closed_form_when_length_large(self):
        for depth in range(1, 7):
            for length in range(max(1, depth - 1), depth + 3):
                assert segment_count_oracle(length, depth) == 4 * length * 5 ** (
                    depth - 1
                )

    def test_count_law(self):
        rng = SplitMix64(5)
        for _ in range(40):
            length = rng.randint(0, 12)
            depth = rng.randint(0, 5)
            seq = random_sequence(rng, length)
            segs = generate_kaleidoscope(seq, KaleidoscopeParams(depth=depth))
            assert len(segs) == segment_count_oracle(length, depth)


class TestProperties:
    def test_mirror_closure_default_start(self):
        rng = SplitMix64(21)
        for _ in range(5):
            seq = random_sequence(rng, rng.randint(1, 10))
            arr = generate_kaleidoscope(seq, KaleidoscopeParams(depth=3)).array
            assert np.all(arr[:, 1] == 0.0)  # every anchor y is exactly 0
            mirrored = arr * np.array([1.0, -1.0, 1.0, -1.0])
            a = sorted(map(tuple, arr))
            b = sorted(map(tuple, mirrored))
            assert a == b

    def test_endpoint_domains(self):
        seq = "ACQRSTAGTACGT"
        arr = generate_kaleidoscope(seq).array
        assert np.all(np.abs(arr[:, 2:]) <= 1.0)
        # each recursion level restarts the walk from the current anchor, so
        # anchors compound up to depth * scale * L
        bound = 4 * 10.0 * len(seq)
        assert np.all(np.abs(arr[:, :2]) <= bound)

    def test_scale_linearity_of_anchors(self):
        seq = "ACDE"
        base = generate_kaleidoscope(seq, KaleidoscopeParams(depth=2, scale=10)).array
        double = generate_kaleidoscope(seq, KaleidoscopeParams(depth=2, scale=20)).array
        assert np.array_equal(double[:, :2], base[:, :2] * 2)
        assert np.array_equal(double[:, 2:], base[:, 2:])

    def test_table_permutation_sensitivity(self):
        table = dict(COORDINATE_TABLE)
        table["A"], table["C"] = table["C"], table["A"]
        seq = "ACDE"
        base = generate_kaleidoscope(seq).array
        swapped = generate_kaleidoscope(seq, table=table).array
        # segments differ exactly where the drawn table point belongs to one
        # of the swapped residues (anchors are unaffected by the table)
        differs = ~np.all(base == swapped, axis=1)
        points = {COORDINATE_TABLE["A"], COORDINATE_TABLE["C"]}
        swapped_mask = np.array(
            [(cx, abs(cy)) in points for cx, cy in base[:, 2:]]
        )
        assert np.array_equal(differs, swapped_mask)
        assert np.array_equal(base[:, :2], swapped[:, :2])


class TestSegmentSet:
    def test_dump_round_trip(self):
        segs = generate_kaleidoscope("AC", KaleidoscopeParams(depth=2))
        again = SegmentSet.loads(segs.dumps())
        assert np.array_equal(segs.array, again.array)

    def test_empty_dump(self):
        empty = SegmentSet(np.empty((0, 4)))
        assert empty.dumps() == ""
        assert len(SegmentSet.loads("")) == 0
