"""Reference classifiers: k-NN and multinomial logistic regression."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .features import FeatureMatrix
from .rng import SplitMix64

EUCLIDEAN = "euclidean"
MANHATTAN = "manhattan"

_MODEL_MAGIC = b"DMD1"


@dataclass
class Prediction:
    id: str
    true_label: str | None
    predicted_label: str
    proba: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.proba, dtype=np.float64)
        if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-9:
            raise DataError(f"invalid probability vector for {self.id!r}")
        self.proba = p


@dataclass
class PredictionSet:
    items: list[Prediction]
    class_names: list[str]

    def __len__(self) -> int:
        return len(self.items)

    def to_json(self) -> str:
        """Serialize as a JSON list of {id, true, pred, proba}.

        Probability columns are reordered to sorted class-name order, which
        is how consumers reconstruct the class-to-column mapping.
        """
        order = np.argsort(np.array(self.class_names))
        return json.dumps(
            [
                {
                    "id": p.id,
                    "true": p.true_label,
                    "pred": p.predicted_label,
                    "proba": [float(p.proba[j]) for j in order],
                }
                for p in self.items
            ],
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PredictionSet":
        """Parse the JSON list; classes are the sorted distinct labels seen."""
        try:
            doc = json.loads(text)
            items = [
                Prediction(p["id"], p["true"], p["pred"], np.array(p["proba"]))
                for p in doc
            ]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataError(f"malformed prediction set: {exc}") from exc
        classes = sorted(
            {p.true_label for p in items if p.true_label is not None}
            | {p.predicted_label for p in items}
        )
        for p in items:
            if len(p.proba) != len(classes):
                raise DataError(
                    f"prediction {p.id!r}: proba length {len(p.proba)} does not "
                    f"match the {len(classes)} observed classes"
                )
        return cls(items, classes)


@dataclass
class KnnModel:
    k: int
    metric: str
    train: FeatureMatrix
    train_time_s: float = 0.0

    def __post_init__(self):
        if self.metric not in (EUCLIDEAN, MANHATTAN):
            raise ConfigError(f"unknown metric {self.metric!r}")
        if not 1 <= self.k <= len(self.train):
            raise ConfigError("k must be in [1, number of training rows]")


@dataclass
class LogRegConfig:
    learning_rate: float = 0.003
    epochs: int = 10
    batch_size: int = 64
    seed: int = 0


@dataclass
class LogRegModel:
    weights: np.ndarray  # (dim + 1, n_classes), bias in the last row
    class_names: list[str]
    schema: dict
    config: LogRegConfig
    train_time_s: float = 0.0


def knn_fit(train: FeatureMatrix, k: int = 5, metric: str = EUCLIDEAN) -> KnnModel:
    if len(train) == 0:
        raise DataError("empty training set")
    if np.any(train.labels < 0):
        raise DataError("training rows must all be labeled")
    return KnnModel(k, metric, train)


def knn_predict(model: KnnModel, rows: FeatureMatrix) -> PredictionSet:
    """Majority vote of the k nearest training rows.

    Distance ties break toward the lower training-row index (stable sort);
    vote ties break toward the lower class index.
    """
    if rows.schema != model.train.schema:
        raise DataError("feature schema mismatch between model and query rows")
    n_classes = len(model.train.class_names)
    X = model.train.values
    preds: list[Prediction] = []
    for i in range(len(rows)):
        q = rows.values[i]
        if model.metric == EUCLIDEAN:
            d = np.sqrt(((X - q) ** 2).sum(axis=1))
        else:
            d = np.abs(X - q).sum(axis=1)
        nearest = np.argsort(d, kind="stable")[: model.k]
        votes = np.bincount(model.train.labels[nearest], minlength=n_classes)
        proba = votes / model.k
        label_idx = int(np.argmax(votes))  # argmax takes the lowest index on ties
        true = (
            rows.class_names[rows.labels[i]] if rows.labels[i] >= 0 else None
        )
        preds.append(
            Prediction(rows.ids[i], true, model.train.class_names[label_idx], proba)
        )
    return PredictionSet(preds, list(model.train.class_names))


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def nll_loss(weights: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Mean multinomial negative log-likelihood; X already has the bias column."""
    p = _softmax(X @ weights)
    return float(-np.mean(np.log(p[np.arange(len(y)), y] + 1e-300)))


def nll_gradient(weights: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Analytic gradient of the mean NLL with respect to the weights."""
    p = _softmax(X @ weights)
    p[np.arange(len(y)), y] -= 1.0
    return X.T @ p / len(y)


def _augment(values: np.ndarray) -> np.ndarray:
    return np.hstack([values, np.ones((values.shape[0], 1))])


def logreg_train(train: FeatureMatrix, config: LogRegConfig | None = None) -> LogRegModel:
    """Mini-batch gradient descent on the softmax NLL, zero-initialized.

    Batches come from a SplitMix64-seeded shuffle each epoch, so training is
    deterministic given the data and seed.
    """
    config = config or LogRegConfig()
    if len(train.class_names) < 2:
        raise DataError("need at least 2 classes")
    if np.any(train.labels < 0):
        raise DataError("training rows must all be labeled")
    X = _augment(train.values)
    y = train.labels
    n, dim = X.shape
    n_classes = len(train.class_names)
    weights = np.zeros((dim, n_classes), dtype=np.float64)
    rng = SplitMix64(config.seed)
    for _epoch in range(config.epochs):
        order = list(range(n))
        rng.shuffle(order)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grad = nll_gradient(weights, X[batch], y[batch])
            weights -= config.learning_rate * grad
        if not np.all(np.isfinite(weights)):
            raise DataError(
                "training diverged (non-finite weights); lower the learning rate"
            )
    return LogRegModel(weights, list(train.class_names), train.schema, config)


def logreg_predict(model: LogRegModel, rows: FeatureMatrix) -> PredictionSet:
    if rows.schema != model.schema:
        raise DataError("feature schema mismatch between model and query rows")
    X = _augment(rows.values)
    proba = _softmax(X @ model.weights)
    preds = []
    for i in range(len(rows)):
        label_idx = int(np.argmax(proba[i]))
        true = rows.class_names[rows.labels[i]] if rows.labels[i] >= 0 else None
        preds.append(
            Prediction(rows.ids[i], true, model.class_names[label_idx], proba[i])
        )
    return PredictionSet(preds, list(model.class_names))


def save_model(model: KnnModel | LogRegModel) -> bytes:
    """Versioned binary model file: magic, JSON header, float64 payload."""
    if isinstance(model, KnnModel):
        header = {
            "kind": "knn",
            "k": model.k,
            "metric": model.metric,
            "ids": model.train.ids,
            "labels": model.train.labels.tolist(),
            "classes": model.train.class_names,
            "schema": model.train.schema,
            "shape": list(model.train.values.shape),
            "train_time_s": model.train_time_s,
        }
        payload = model.train.values.astype("<f8").tobytes()
    else:
        header = {
            "kind": "logreg",
            "classes": model.class_names,
            "schema": model.schema,
            "shape": list(model.weights.shape),
            "config": vars(model.config),
            "train_time_s": model.train_time_s,
        }
        payload = model.weights.astype("<f8").tobytes()
    hdr = json.dumps(header).encode("utf-8")
    return _MODEL_MAGIC + struct.pack("<I", len(hdr)) + hdr + payload


def load_model(blob: bytes) -> KnnModel | LogRegModel:
    if blob[:4] != _MODEL_MAGIC:
        raise DataError("bad model file magic")
    (hlen,) = struct.unpack("<I", blob[4:8])
    header = json.loads(blob[8 : 8 + hlen].decode("utf-8"))
    data = np.frombuffer(blob[8 + hlen :], dtype="<f8").astype(np.float64)
    shape = tuple(header["shape"])
    if data.size != shape[0] * shape[1]:
        raise DataError("truncated model payload")
    if header["kind"] == "knn":
        train = FeatureMatrix(
            header["ids"],
            data.reshape(shape),
            np.array(header["labels"], np.int64),
            header["classes"],
            header["schema"],
        )
        model = KnnModel(header["k"], header["metric"], train)
        model.train_time_s = header.get("train_time_s", 0.0)
        return model
    if header["kind"] == "logreg":
        return LogRegModel(
            data.reshape(shape),
            header["classes"],
            header["schema"],
            LogRegConfig(**header["config"]),
            header.get("train_time_s", 0.0),
        )
    raise DataError(f"unknown model kind {header['kind']!r}")
