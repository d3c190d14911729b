"""Command line front end: train on a manifest, write prediction files.

    dance-harness --manifest img/manifest.json --blocks 3 --out-dir run/

writes run/predictions.json (wire schema, scoreable by the main pipeline's
eval command) and run/run.json (architecture, hyperparameters, wall time).
"""

import argparse
import json
import sys
from pathlib import Path

from .data import load_dataset
from .errors import ConfigError, DataError
from .model import CnnSpec
from .train import TrainConfig, train_and_predict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dance-harness")
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--blocks", type=int, default=3)
    parser.add_argument("--channels", type=int, default=1)
    parser.add_argument("--image-size", type=int, default=380)
    parser.add_argument("--learning-rate", type=float, default=0.003)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--epochs", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        spec = CnnSpec(
            n_blocks=args.blocks,
            in_channels=args.channels,
            input_size=args.image_size,
        )
        config = TrainConfig(
            learning_rate=args.learning_rate,
            batch_size=args.batch_size,
            epochs=args.epochs,
            seed=args.seed,
        )
        dataset = load_dataset(
            args.manifest,
            image_size=(args.image_size, args.image_size),
            channels=args.channels,
        )
        predictions, metadata = train_and_predict(dataset, spec, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "predictions.json").write_text(json.dumps(predictions, indent=2))
    (out_dir / "run.json").write_text(json.dumps(metadata, indent=2))
    print(out_dir / "predictions.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
