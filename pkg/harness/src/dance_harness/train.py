"""Train a CNN on a loaded dataset and emit predictions plus run metadata.

The harness computes no metrics. Its outputs are a prediction list in the
shared wire schema (a JSON array of {"id", "true", "pred", "proba"} with
probability columns in sorted class-name order) and a metadata dict
recording the architecture, hyperparameters, seed, wall time, and the
per-epoch training losses.
"""

import math
import time
from dataclasses import dataclass

import torch
from torch import nn

from .data import HarnessDataset
from .errors import DataError
from .model import CnnSpec, build_model


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.003
    batch_size: int = 64
    epochs: int = 10
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "seed": self.seed,
        }


def train_and_predict(
    dataset: HarnessDataset,
    spec: CnnSpec | None = None,
    config: TrainConfig | None = None,
) -> tuple[list[dict], dict]:
    """Train on the train split, predict the test split.

    Deterministic for a fixed seed on a fixed machine: model init and
    batch shuffling both derive from config.seed. A non-finite loss
    aborts with the epoch index.
    """
    spec = spec or CnnSpec()
    config = config or TrainConfig()
    train, test = dataset.train, dataset.test
    if len(train.ids) == 0 or len(test.ids) == 0:
        raise DataError("both train and test splits must be non-empty")

    torch.manual_seed(config.seed)
    model = build_model(spec, n_classes=len(dataset.class_names))
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.NLLLoss()
    n_train = len(train.ids)
    batches = max(1, math.ceil(n_train / config.batch_size))

    start = time.perf_counter()
    epoch_losses = []
    generator = torch.Generator().manual_seed(config.seed)
    model.train()
    for epoch in range(config.epochs):
        order = torch.randperm(n_train, generator=generator)
        total = 0.0
        for b in range(batches):
            idx = order[b * config.batch_size : (b + 1) * config.batch_size]
            optimizer.zero_grad()
            loss = loss_fn(model(train.images[idx]), train.labels[idx])
            if not torch.isfinite(loss):
                raise DataError(f"training diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(idx)
        epoch_losses.append(total / n_train)
    train_time_s = time.perf_counter() - start

    model.eval()
    with torch.no_grad():
        log_probs = model(test.images)
    # exact float64 normalization so downstream probability validation holds
    probs = torch.exp(log_probs.double())
    probs = probs / probs.sum(dim=1, keepdim=True)
    wire_order = sorted(range(len(dataset.class_names)),
                        key=lambda i: dataset.class_names[i])
    predictions = []
    for row, true_idx, entry_id in zip(probs, test.labels, test.ids):
        pred_idx = int(torch.argmax(row))
        predictions.append({
            "id": entry_id,
            "true": dataset.class_names[int(true_idx)],
            "pred": dataset.class_names[pred_idx],
            "proba": [float(row[i]) for i in wire_order],
        })
    metadata = {
        "spec": spec.to_dict(),
        "config": config.to_dict(),
        "train_time_s": train_time_s,
        "seed": config.seed,
        "epoch_losses": epoch_losses,
        "batches_per_epoch": batches,
    }
    return predictions, metadata
