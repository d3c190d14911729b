"""Fixed-length feature vectors from sequences, images, and FCGR grids."""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass

import numpy as np

from .cgr import FcgrGrid
from .errors import ConfigError, DataError
from .raster import BACKGROUND, RasterImage
from .seqdata import ALPHABET, ProteinSequence

_RANK = {res: i for i, res in enumerate(ALPHABET)}

_MAGIC = b"DFM1"


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    source_id: str
    schema: dict

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(vals)):
            raise DataError(f"non-finite feature values for {self.source_id!r}")
        object.__setattr__(self, "values", vals)


@dataclass
class FeatureMatrix:
    """Rectangular feature rows with aligned integer class labels."""

    ids: list[str]
    values: np.ndarray  # (n, dim) float64
    labels: np.ndarray  # (n,) int64, -1 for unlabeled
    class_names: list[str]
    schema: dict

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = len(self.ids)
        if self.values.shape[0] != n or self.labels.shape[0] != n:
            raise DataError("feature matrix rows, ids, and labels must align")
        if np.any(self.labels >= len(self.class_names)):
            raise DataError("label index out of range")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.values.shape[1] if self.values.ndim == 2 else 0

    @classmethod
    def from_vectors(
        cls,
        vectors: list[FeatureVector],
        labels: list[str | None],
        class_names: list[str],
    ) -> "FeatureMatrix":
        if not vectors:
            raise DataError("empty feature matrix")
        schema = vectors[0].schema
        for v in vectors:
            if v.schema != schema:
                raise DataError("mixed feature schemas in one matrix")
        idx = {c: i for i, c in enumerate(class_names)}
        lab = np.array([idx[l] if l is not None else -1 for l in labels], np.int64)
        values = np.stack([v.values for v in vectors])
        return cls([v.source_id for v in vectors], values, lab, list(class_names), schema)

    def to_csv(self) -> str:
        buf = io.StringIO()
        dim = self.dim
        buf.write("id,label," + ",".join(f"f{i}" for i in range(dim)) + "\n")
        for i, seq_id in enumerate(self.ids):
            label = self.class_names[self.labels[i]] if self.labels[i] >= 0 else ""
            row = ",".join(repr(v) for v in self.values[i])
            buf.write(f"{seq_id},{label},{row}\n")
        return buf.getvalue()

    def to_bytes(self) -> bytes:
        """Compact binary: magic, header length + JSON header, f32 data."""
        header = json.dumps(
            {
                "ids": self.ids,
                "labels": self.labels.tolist(),
                "classes": self.class_names,
                "schema": self.schema,
                "rows": int(self.values.shape[0]),
                "cols": int(self.dim),
            }
        ).encode("utf-8")
        data = self.values.astype("<f4").tobytes()
        return _MAGIC + struct.pack("<I", len(header)) + header + data

    @classmethod
    def from_bytes(cls, blob: bytes) -> "FeatureMatrix":
        if blob[:4] != _MAGIC:
            raise DataError("bad feature file magic")
        (hlen,) = struct.unpack("<I", blob[4:8])
        header = json.loads(blob[8 : 8 + hlen].decode("utf-8"))
        rows, cols = header["rows"], header["cols"]
        data = np.frombuffer(
            blob[8 + hlen : 8 + hlen + rows * cols * 4], dtype="<f4"
        )
        if data.size != rows * cols:
            raise DataError("truncated feature file")
        return cls(
            header["ids"],
            data.astype(np.float64).reshape(rows, cols),
            np.array(header["labels"], np.int64),
            header["classes"],
            header["schema"],
        )


def ohe_encode(seq: ProteinSequence | str, max_len: int) -> FeatureVector:
    """One-hot encode with zero padding to max_len positions.

    Position i, residue with alphabetical rank r sets index 20*i + r.
    """
    residues = seq.residues if isinstance(seq, ProteinSequence) else seq
    source_id = seq.id if isinstance(seq, ProteinSequence) else ""
    if len(residues) > max_len:
        raise DataError(
            f"sequence {source_id!r} longer than max_len ({len(residues)} > {max_len})"
        )
    values = np.zeros(20 * max_len, dtype=np.float64)
    for i, res in enumerate(residues):
        try:
            values[20 * i + _RANK[res]] = 1.0
        except KeyError:
            raise DataError(f"unknown residue {res!r}") from None
    return FeatureVector(values, source_id, {"mode": "OHE", "max_len": max_len})


def ohe_decode(vector: FeatureVector) -> str:
    """Recover the residue string from a one-hot vector."""
    if vector.schema.get("mode") != "OHE":
        raise DataError("not an OHE vector")
    max_len = vector.schema["max_len"]
    residues = []
    for i in range(max_len):
        block = vector.values[20 * i : 20 * (i + 1)]
        hits = np.nonzero(block)[0]
        if hits.size == 0:
            break
        if hits.size > 1:
            raise DataError(f"position {i}: multiple residues set")
        residues.append(ALPHABET[hits[0]])
    return "".join(residues)


def pixels_features(image: RasterImage, downsample: int = 10) -> FeatureVector:
    """Block-average pooling of the binary ink mask, row-major flattened."""
    if downsample < 1:
        raise ConfigError("downsample must be >= 1")
    if image.width % downsample or image.height % downsample:
        raise ConfigError(
            f"downsample {downsample} does not divide {image.width}x{image.height}"
        )
    ink = (image.pixels != BACKGROUND).astype(np.float64)
    h, w = ink.shape
    pooled = ink.reshape(h // downsample, downsample, w // downsample, downsample)
    values = pooled.mean(axis=(1, 3)).reshape(-1)
    return FeatureVector(
        values, "", {"mode": "PIXELS", "downsample": downsample,
                     "width": image.width, "height": image.height}
    )


def fcgr_features(grid: FcgrGrid) -> FeatureVector:
    """Row-major counts, L1-normalized by the sequence length."""
    total = int(grid.counts.sum())
    counts = grid.counts.astype(np.float64).reshape(-1)
    values = counts / total if total else counts
    return FeatureVector(values, "", {"mode": "FCGR", "resolution": grid.resolution})
