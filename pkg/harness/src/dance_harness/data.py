"""Load image datasets described by a manifest JSON file.

The manifest is the file-level contract with the rendering pipeline:

    {"seed": 0, "classes": [...],
     "entries": [{"id", "path", "label", "split"}, ...]}

Paths are relative to the manifest's directory and point at PGM or PNG
grayscale images. The split field is taken as-is; this module never
re-splits.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .errors import DataError


@dataclass
class SplitTensors:
    """One split's images as a float tensor plus aligned ids and labels."""

    ids: list[str]
    images: torch.Tensor  # (N, C, H, W) float32 in [0, 1]
    labels: torch.Tensor  # (N,) int64 indices into class_names


@dataclass
class HarnessDataset:
    class_names: list[str]
    train: SplitTensors
    test: SplitTensors


def _read_pgm(blob: bytes, entry_id: str) -> np.ndarray:
    parts = blob.split(maxsplit=4)
    if len(parts) < 5 or parts[0] != b"P5":
        raise DataError(f"entry {entry_id!r}: not a binary PGM file")
    try:
        width, height, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError as exc:
        raise DataError(f"entry {entry_id!r}: bad PGM header: {exc}") from exc
    if maxval != 255:
        raise DataError(f"entry {entry_id!r}: unsupported PGM maxval {maxval}")
    data = parts[4][: width * height]
    if len(data) != width * height:
        raise DataError(f"entry {entry_id!r}: truncated PGM pixel data")
    return np.frombuffer(data, np.uint8).reshape(height, width)


def _read_image(path: Path, entry_id: str) -> np.ndarray:
    if not path.exists():
        raise DataError(f"entry {entry_id!r}: missing image file {path}")
    if path.suffix == ".pgm":
        return _read_pgm(path.read_bytes(), entry_id)
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), np.uint8)


def load_dataset(
    manifest_path,
    image_size: tuple[int, int] = (380, 380),
    channels: int = 1,
) -> HarnessDataset:
    """Read every image named by the manifest, grouped by its split field.

    Grayscale intensities are scaled to [0, 1] and replicated across
    `channels`, so the per-pixel channel mean equals the original
    intensity. An image whose size differs from `image_size` is an error
    naming the offending entry.
    """
    manifest_path = Path(manifest_path)
    try:
        doc = json.loads(manifest_path.read_text())
        classes = list(doc["classes"])
        entries = doc["entries"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"cannot read manifest {manifest_path}: {exc}") from exc

    width, height = image_size
    class_index = {c: i for i, c in enumerate(classes)}
    buckets: dict[str, list] = {"train": [], "test": []}
    for entry in entries:
        split = entry.get("split")
        if split not in buckets:
            raise DataError(
                f"entry {entry.get('id')!r}: split {split!r} "
                "(expected 'train' or 'test'; run the split step first)"
            )
        label = entry.get("label")
        if label not in class_index:
            raise DataError(f"entry {entry.get('id')!r}: unknown label {label!r}")
        pixels = _read_image(manifest_path.parent / entry["path"], entry["id"])
        if pixels.shape != (height, width):
            raise DataError(
                f"entry {entry['id']!r}: image is {pixels.shape[1]}x"
                f"{pixels.shape[0]}, expected {width}x{height}"
            )
        buckets[split].append((entry["id"], pixels, class_index[label]))

    def pack(rows) -> SplitTensors:
        if not rows:
            return SplitTensors(
                [], torch.empty(0, channels, height, width), torch.empty(0, dtype=torch.int64)
            )
        ids = [r[0] for r in rows]
        stack = np.stack([r[1] for r in rows]).astype(np.float32) / 255.0
        images = torch.from_numpy(stack).unsqueeze(1).repeat(1, channels, 1, 1)
        labels = torch.tensor([r[2] for r in rows], dtype=torch.int64)
        return SplitTensors(ids, images, labels)

    return HarnessDataset(classes, pack(buckets["train"]), pack(buckets["test"]))
