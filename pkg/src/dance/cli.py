"""Command-line pipelines: synth, render, split, featurize, train, predict, eval.

Exit codes: 0 success, 1 usage/configuration error, 2 data error, 3 internal.
"""

from __future__ import annotations

import argparse
import copy
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import cgr as cgr_mod
from . import classify as classify_mod
from . import features as features_mod
from . import metrics as metrics_mod
from . import raster as raster_mod
from . import seqdata
from .errors import ConfigError, DataError
from .kaleidoscope import KaleidoscopeParams, generate_kaleidoscope

DEFAULT_CONFIG = {
    "seed": 0,
    "kaleidoscope": {"depth": 4, "pos": [0.0, 0.0], "angle": 0.0, "scale": 10.0},
    "raster": {"width": 380, "height": 380, "pad_fraction": 0.05, "gray": 0},
    "cgr": {"ratio": 0.5, "start": [0.5, 0.5], "resolution": 16},
    "features": {"mode": "pixels", "max_len": None, "downsample": 10},
    "classify": {
        "model": "knn",
        "k": 5,
        "metric": "euclidean",
        "learning_rate": 0.003,
        "epochs": 10,
        "batch_size": 64,
    },
    "split": {"test_fraction": 0.2, "stratified": True, "seed": 0},
}


def load_config(path: str | None) -> dict:
    """Merge a JSON config over the defaults; unknown keys are rejected."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is None:
        return config
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    _merge(config, doc, [])
    return config


def _merge(base: dict, overlay: dict, trail: list[str]) -> None:
    for key, value in overlay.items():
        if key not in base:
            where = ".".join(trail + [str(key)])
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            _merge(base[key], value, trail + [key])
        else:
            base[key] = value


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _read_sequences(fasta_path: str) -> list[seqdata.ProteinSequence]:
    try:
        text = Path(fasta_path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {fasta_path}: {exc}") from exc
    return seqdata.parse_fasta(text)


def _read_labels(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return seqdata.parse_labels_csv(text)


def _render_one(args: tuple) -> tuple[str, bytes]:
    """Render a single sequence to image bytes (worker for parallel mode)."""
    seq_id, residues, method, fmt, cfg = args
    if method == "dance":
        params = KaleidoscopeParams(
            depth=cfg["kaleidoscope"]["depth"],
            pos=tuple(cfg["kaleidoscope"]["pos"]),
            angle=cfg["kaleidoscope"]["angle"],
            scale=cfg["kaleidoscope"]["scale"],
        )
        segments = generate_kaleidoscope(residues, params)
        if len(segments) == 0:
            raise DataError(f"sequence {seq_id!r} produced no segments (depth 0?)")
        geometry = segments
    else:
        walk = cgr_mod.cgr_walk(
            residues, start=tuple(cfg["cgr"]["start"]), ratio=cfg["cgr"]["ratio"]
        )
        pts = walk.points
        geometry = np.hstack([pts, pts])
    image = raster_mod.rasterize(
        geometry,
        width=cfg["raster"]["width"],
        height=cfg["raster"]["height"],
        pad_fraction=cfg["raster"]["pad_fraction"],
        ink=cfg["raster"]["gray"],
    )
    buf = io.BytesIO()
    if fmt == "pgm":
        raster_mod.write_pgm(image, buf)
    else:
        raster_mod.write_png(image, buf)
    return seq_id, buf.getvalue()


def cmd_render(args, config) -> int:
    sequences = _read_sequences(args.fasta)
    labels = _read_labels(args.labels) if args.labels else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    tasks = [
        (seq.id, seq.residues, args.method, args.format, config)
        for seq in sequences
    ]
    serial = (
        args.jobs <= 1 or os.environ.get("DANCE_NO_PARALLEL") == "1"
    )
    written: list[Path] = []
    try:
        if serial:
            results = map(_render_one, tasks)
        else:
            pool = ProcessPoolExecutor(max_workers=args.jobs)
            results = pool.map(_render_one, tasks)
        for seq_id, blob in results:
            path = out_dir / f"{seq_id}.{args.format}"
            path.write_bytes(blob)
            written.append(path)
        if not serial:
            pool.shutdown()
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    manifest = seqdata.manifest_from_sequences(
        sequences,
        labels=labels,
        paths={seq.id: f"{seq.id}.{args.format}" for seq in sequences},
        seed=config["seed"],
    )
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(manifest.dumps())
    print(manifest_path)
    return 0


def cmd_synth(args, config) -> int:
    sequences = seqdata.synth_dataset(
        args.classes,
        args.per_class,
        (args.length_min, args.length_max),
        args.motif_length,
        args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "synth.fasta").write_text(seqdata.write_fasta(sequences))
    rows = ["id,label"] + [f"{s.id},{s.label}" for s in sequences]
    (out_dir / "labels.csv").write_text("\n".join(rows) + "\n")
    print(out_dir / "synth.fasta")
    return 0


def cmd_split(args, config) -> int:
    manifest = seqdata.DatasetManifest.loads(Path(args.manifest).read_text())
    spec = seqdata.SplitSpec(
        test_fraction=args.test_fraction,
        seed=args.seed,
        stratified=config["split"]["stratified"],
    )
    result = seqdata.stratified_split(manifest, spec)
    out = Path(args.out or args.manifest)
    out.write_text(result.dumps())
    print(out)
    return 0


def _featurize_rows(args, config):
    manifest = None
    if args.manifest:
        manifest = seqdata.DatasetManifest.loads(Path(args.manifest).read_text())
    sequences = _read_sequences(args.fasta) if args.fasta else None
    labels: dict[str, str | None] = {}
    if manifest:
        wanted = {
            e.id: e
            for e in manifest.entries
            if args.split == "all" or e.split == args.split
        }
        labels = {e.id: e.label for e in wanted.values()}
        class_names = list(manifest.class_names)
    elif sequences is not None:
        label_map = _read_labels(args.labels) if args.labels else {}
        wanted = {s.id: None for s in sequences}
        labels = {s.id: label_map.get(s.id) for s in sequences}
        class_names = sorted(set(label_map.values()))
    else:
        raise ConfigError("featurize needs --manifest or --fasta")

    mode = args.mode
    vectors = []
    row_labels = []
    if mode == "pixels":
        if manifest is None:
            raise ConfigError("pixels mode needs --manifest with image paths")
        base = Path(args.manifest).parent
        for e in manifest.entries:
            if e.id not in wanted:
                continue
            path = base / e.path
            if path.suffix == ".pgm":
                w, h, pixels = raster_mod.read_pgm(path.read_bytes())
            else:
                w, h, pixels = raster_mod.read_png(str(path))
            image = raster_mod.RasterImage(
                w, h, pixels,
                raster_mod.Viewport(0.0, float(w), -float(h) / 2, float(h) / 2, w, h),
            )
            vec = features_mod.pixels_features(image, args.downsample)
            vectors.append(
                features_mod.FeatureVector(vec.values, e.id, vec.schema)
            )
            row_labels.append(labels[e.id])
    else:
        if sequences is None:
            raise ConfigError(f"{mode} mode needs --fasta")
        selected = [s for s in sequences if s.id in wanted]
        if mode == "ohe":
            max_len = args.max_len or max(len(s) for s in sequences)
            for s in selected:
                vec = features_mod.ohe_encode(s, max_len)
                vectors.append(vec)
                row_labels.append(labels[s.id])
        elif mode == "fcgr":
            for s in selected:
                walk = cgr_mod.cgr_walk(
                    s, start=tuple(config["cgr"]["start"]), ratio=config["cgr"]["ratio"]
                )
                grid = cgr_mod.fcgr_grid(walk, args.resolution)
                vec = features_mod.fcgr_features(grid)
                vectors.append(
                    features_mod.FeatureVector(vec.values, s.id, vec.schema)
                )
                row_labels.append(labels[s.id])
        else:
            raise ConfigError(f"unknown feature mode {mode!r}")
    if not vectors:
        raise DataError("no rows selected for featurization")
    return features_mod.FeatureMatrix.from_vectors(vectors, row_labels, class_names)


def cmd_featurize(args, config) -> int:
    matrix = _featurize_rows(args, config)
    out = Path(args.out)
    if args.csv:
        out.write_text(matrix.to_csv())
    else:
        out.write_bytes(matrix.to_bytes())
    print(out)
    return 0


def cmd_train(args, config) -> int:
    matrix = features_mod.FeatureMatrix.from_bytes(Path(args.features).read_bytes())
    start = time.perf_counter()
    if args.model == "knn":
        model = classify_mod.knn_fit(matrix, k=args.k, metric=args.metric)
    elif args.model == "logreg":
        cfg = classify_mod.LogRegConfig(
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            batch_size=args.batch_size,
            seed=args.seed,
        )
        model = classify_mod.logreg_train(matrix, cfg)
    else:
        raise ConfigError(f"unknown model {args.model!r}")
    model.train_time_s = time.perf_counter() - start
    Path(args.out).write_bytes(classify_mod.save_model(model))
    print(args.out)
    return 0


def cmd_predict(args, config) -> int:
    model = classify_mod.load_model(Path(args.model).read_bytes())
    matrix = features_mod.FeatureMatrix.from_bytes(Path(args.features).read_bytes())
    if isinstance(model, classify_mod.KnnModel):
        preds = classify_mod.knn_predict(model, matrix)
    else:
        preds = classify_mod.logreg_predict(model, matrix)
    Path(args.out).write_text(preds.to_json())
    print(args.out)
    return 0


def cmd_eval(args, config) -> int:
    preds = classify_mod.PredictionSet.from_json(Path(args.predictions).read_text())
    train_time = 0.0
    if args.model:
        model = classify_mod.load_model(Path(args.model).read_bytes())
        train_time = model.train_time_s
    report = metrics_mod.classification_metrics(preds, train_time_s=train_time)
    if args.out:
        Path(args.out).write_text(report.to_json())
    print(report.to_table(method=args.method))
    return 0


def _add_common(p):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int, help="global seed override")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dance", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render FASTA sequences to images")
    p.add_argument("--fasta", required=True)
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["dance", "cgr"], default="dance")
    p.add_argument("--format", choices=["pgm", "png"], default="pgm")
    p.add_argument("--depth", type=int)
    p.add_argument("--scale", type=float)
    p.add_argument("--angle", type=float)
    p.add_argument("--pos", help="x,y start position")
    p.add_argument("--size", help="WxH pixel size")
    p.add_argument("--gray", type=int, help="ink gray level 0-254")
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--length-min", type=int, default=12)
    p.add_argument("--length-max", type=int, default=18)
    p.add_argument("--motif-length", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="assign train/test splits in a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("featurize", help="build a feature matrix file")
    p.add_argument("--manifest")
    p.add_argument("--fasta")
    p.add_argument("--labels")
    p.add_argument("--mode", choices=["pixels", "ohe", "fcgr"], required=True)
    p.add_argument("--split", choices=["all", "train", "test"], default="all")
    p.add_argument("--downsample", type=int, default=10)
    p.add_argument("--max-len", type=int)
    p.add_argument("--resolution", type=int, default=16)
    p.add_argument("--csv", action="store_true", help="write CSV instead of binary")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a classifier on a feature matrix")
    p.add_argument("--features", required=True)
    p.add_argument("--model", choices=["knn", "logreg"], default="knn")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--metric", choices=["euclidean", "manhattan"], default="euclidean")
    p.add_argument("--learning-rate", type=float, default=0.003)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score a feature matrix with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="compute the metric suite from predictions")
    p.add_argument("--predictions", required=True)
    p.add_argument("--out")
    p.add_argument("--model", help="model file; supplies train time")
    p.add_argument("--method", default="", help="method name for the table")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(func=cmd_eval)
    return parser


def _apply_overrides(args, config) -> None:
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "depth", None) is not None:
        config["kaleidoscope"]["depth"] = args.depth
    if getattr(args, "scale", None) is not None:
        config["kaleidoscope"]["scale"] = args.scale
    if getattr(args, "angle", None) is not None:
        config["kaleidoscope"]["angle"] = args.angle
    if getattr(args, "pos", None):
        x, y = args.pos.split(",")
        config["kaleidoscope"]["pos"] = [float(x), float(y)]
    if getattr(args, "size", None):
        w, h = args.size.lower().split("x")
        config["raster"]["width"] = int(w)
        config["raster"]["height"] = int(h)
    if getattr(args, "gray", None) is not None:
        if not 0 <= args.gray <= 254:
            raise ConfigError("--gray must be in [0, 254]")
        config["raster"]["gray"] = args.gray


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(getattr(args, "config", None))
        _apply_overrides(args, config)
        return args.func(args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failures
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
