import json
import math

import numpy as np
import pytest
import torch

from dance_harness import DataError, load_dataset


def write_pgm(path, pixels):
    pixels = np.asarray(pixels, np.uint8)
    h, w = pixels.shape
    path.write_bytes(b"P5\n%d %d\n255\n" % (w, h) + pixels.tobytes())


def write_manifest(root, entries, classes):
    doc = {"seed": 0, "classes": classes, "entries": entries}
    path = root / "manifest.json"
    path.write_text(json.dumps(doc))
    return path


def make_dataset(root, n_train=6, n_test=2, size=10):
    entries = []
    for i in range(n_train + n_test):
        name = f"img{i}.pgm"
        value = 255 if i % 2 else 0
        write_pgm(root / name, np.full((size, size), value))
        entries.append({
            "id": f"img{i}",
            "path": name,
            "label": "dark" if value == 0 else "light",
            "split": "train" if i < n_train else "test",
        })
    return write_manifest(root, entries, ["dark", "light"])


class TestLoadDataset:
    def test_split_sizes_and_batch_count(self, tmp_path):
        path = make_dataset(tmp_path, n_train=6, n_test=2)
        ds = load_dataset(path, image_size=(10, 10))
        assert len(ds.train.ids) == 6 and len(ds.test.ids) == 2
        assert math.ceil(len(ds.train.ids) / 64) == 1

    def test_intensity_scaling(self, tmp_path):
        path = make_dataset(tmp_path, size=4)
        ds = load_dataset(path, image_size=(4, 4))
        by_id = dict(zip(ds.train.ids, ds.train.images))
        assert torch.all(by_id["img0"] == 0.0)
        assert torch.all(by_id["img1"] == 1.0)

    def test_channel_replication_mean(self, tmp_path):
        root = tmp_path
        pixels = np.arange(16, dtype=np.uint8).reshape(4, 4) * 16
        write_pgm(root / "a.pgm", pixels)
        write_pgm(root / "b.pgm", 255 - pixels)
        path = write_manifest(root, [
            {"id": "a", "path": "a.pgm", "label": "x", "split": "train"},
            {"id": "b", "path": "b.pgm", "label": "y", "split": "test"},
        ], ["x", "y"])
        ds = load_dataset(path, image_size=(4, 4), channels=3)
        img = ds.train.images[0]
        assert img.shape == (3, 4, 4)
        want = torch.from_numpy(pixels.astype(np.float32) / 255.0)
        assert torch.allclose(img.mean(dim=0), want)

    def test_wrong_size_names_entry(self, tmp_path):
        path = make_dataset(tmp_path, size=10)
        with pytest.raises(DataError, match="img0"):
            load_dataset(path, image_size=(380, 380))

    def test_missing_file_names_entry(self, tmp_path):
        path = make_dataset(tmp_path, size=10)
        (tmp_path / "img3.pgm").unlink()
        with pytest.raises(DataError, match="img3"):
            load_dataset(path, image_size=(10, 10))

    def test_unassigned_split_rejected(self, tmp_path):
        write_pgm(tmp_path / "a.pgm", np.zeros((4, 4)))
        path = write_manifest(tmp_path, [
            {"id": "a", "path": "a.pgm", "label": "x", "split": "unassigned"},
        ], ["x"])
        with pytest.raises(DataError, match="split"):
            load_dataset(path, image_size=(4, 4))

    def test_png_images(self, tmp_path):
        from PIL import Image

        pixels = np.full((4, 4), 7, np.uint8)
        Image.fromarray(pixels, mode="L").save(tmp_path / "a.png")
        write_pgm(tmp_path / "b.pgm", np.zeros((4, 4)))
        path = write_manifest(tmp_path, [
            {"id": "a", "path": "a.png", "label": "x", "split": "train"},
            {"id": "b", "path": "b.pgm", "label": "y", "split": "test"},
        ], ["x", "y"])
        ds = load_dataset(path, image_size=(4, 4))
        assert torch.allclose(ds.train.images[0], torch.tensor(7 / 255.0))

    def test_unknown_label(self, tmp_path):
        write_pgm(tmp_path / "a.pgm", np.zeros((4, 4)))
        path = write_manifest(tmp_path, [
            {"id": "a", "path": "a.pgm", "label": "nope", "split": "train"},
        ], ["x"])
        with pytest.raises(DataError, match="nope"):
            load_dataset(path, image_size=(4, 4))
