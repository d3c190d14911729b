"""Evaluation suite: accuracy, precision/recall/F1, and one-vs-rest ROC-AUC."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classify import PredictionSet
from .errors import DataError


@dataclass
class EvalReport:
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    f1_macro: float
    roc_auc_ovr: float
    train_time_s: float
    per_class: dict[str, dict]

    def to_json(self) -> str:
        return json.dumps(
            {
                "accuracy": self.accuracy,
                "precision_weighted": self.precision_weighted,
                "recall_weighted": self.recall_weighted,
                "f1_weighted": self.f1_weighted,
                "f1_macro": self.f1_macro,
                "roc_auc_ovr": self.roc_auc_ovr,
                "train_time_s": self.train_time_s,
                "per_class": self.per_class,
            },
            indent=2,
        )

    def to_table(self, method: str = "") -> str:
        """One-row text table: Acc., Prec., Recall, F1 weighted, F1 macro,
        ROC AUC, train time."""
        headers = [
            "Method", "Acc.", "Prec.", "Recall",
            "F1 (Weig.)", "F1 (Macro)", "ROC AUC", "Train Time (s)",
        ]
        row = [
            method or "-",
            f"{self.accuracy:.3f}",
            f"{self.precision_weighted:.3f}",
            f"{self.recall_weighted:.3f}",
            f"{self.f1_weighted:.3f}",
            f"{self.f1_macro:.3f}",
            f"{self.roc_auc_ovr:.3f}",
            f"{self.train_time_s:.3f}",
        ]
        widths = [max(len(h), len(v)) for h, v in zip(headers, row)]
        line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths))
        return "\n".join([line(headers), line(["-" * w for w in widths]), line(row)])


def _labels_as_indices(preds: PredictionSet) -> tuple[np.ndarray, np.ndarray]:
    if len(preds) == 0:
        raise DataError("empty prediction set")
    idx = {c: i for i, c in enumerate(preds.class_names)}
    try:
        y_true = np.array([idx[p.true_label] for p in preds.items], np.int64)
    except KeyError:
        raise DataError("every prediction needs a true label for evaluation") from None
    y_pred = np.array([idx[p.predicted_label] for p in preds.items], np.int64)
    return y_true, y_pred


def confusion_matrix(preds: PredictionSet) -> np.ndarray:
    """Counts[i, j] = items with true class i predicted as class j."""
    y_true, y_pred = _labels_as_indices(preds)
    n = len(preds.class_names)
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    return counts


def binary_auc(scores: np.ndarray, positive: np.ndarray) -> float:
    """AUC via the Mann-Whitney rank statistic with midrank tie handling."""
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = len(positive) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("binary AUC needs both positives and negatives")
    ranks = _midranks(scores)
    r_pos = ranks[positive].sum()
    return (r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _midranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def roc_auc_ovr(preds: PredictionSet) -> float:
    """Support-weighted mean of per-class one-vs-rest AUCs.

    Classes with no positives or no negatives among the true labels are
    skipped and excluded from the weights.
    """
    y_true, _ = _labels_as_indices(preds)
    if len(np.unique(y_true)) < 2:
        raise DataError("ROC-AUC needs at least 2 distinct true classes")
    proba = np.stack([p.proba for p in preds.items])
    total_weight = 0
    weighted_sum = 0.0
    for c in range(len(preds.class_names)):
        positive = y_true == c
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == len(y_true):
            continue
        auc = binary_auc(proba[:, c], positive)
        weighted_sum += n_pos * auc
        total_weight += n_pos
    return weighted_sum / total_weight


def per_class_auc(preds: PredictionSet) -> dict[str, float | None]:
    y_true, _ = _labels_as_indices(preds)
    proba = np.stack([p.proba for p in preds.items])
    out: dict[str, float | None] = {}
    for c, name in enumerate(preds.class_names):
        positive = y_true == c
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == len(y_true):
            out[name] = None
        else:
            out[name] = binary_auc(proba[:, c], positive)
    return out


def classification_metrics(
    preds: PredictionSet, train_time_s: float = 0.0, with_auc: bool = True
) -> EvalReport:
    """Full report. Zero-denominator precision/recall/F1 are defined as 0."""
    counts = confusion_matrix(preds)
    support = counts.sum(axis=1)
    tp = np.diag(counts).astype(np.float64)
    predicted = counts.sum(axis=0).astype(np.float64)

    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(
        tp, support.astype(np.float64), out=np.zeros_like(tp), where=support > 0
    )
    pr_sum = precision + recall
    f1 = np.divide(
        2 * precision * recall, pr_sum, out=np.zeros_like(tp), where=pr_sum > 0
    )

    total = int(counts.sum())
    accuracy = float(tp.sum() / total)
    weights = support / total
    aucs = per_class_auc(preds) if with_auc else {}
    per_class = {
        name: {
            "precision": float(precision[c]),
            "recall": float(recall[c]),
            "f1": float(f1[c]),
            "support": int(support[c]),
            "auc": aucs.get(name),
        }
        for c, name in enumerate(preds.class_names)
    }
    return EvalReport(
        accuracy=accuracy,
        precision_weighted=float((weights * precision).sum()),
        recall_weighted=float((weights * recall).sum()),
        f1_weighted=float((weights * f1).sum()),
        f1_macro=float(f1.mean()),
        roc_auc_ovr=roc_auc_ovr(preds) if with_auc else 0.0,
        train_time_s=train_time_s,
        per_class=per_class,
    )
