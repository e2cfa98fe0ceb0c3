"""Classification metrics: accuracy, per-class precision/recall/F1, weighted F1."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError


def _check(preds, golds):
    preds = np.asarray(preds, dtype=np.intp)
    golds = np.asarray(golds, dtype=np.intp)
    if preds.shape != golds.shape:
        raise ContractError(f"length mismatch: {preds.shape} preds vs {golds.shape} golds")
    if preds.size == 0:
        raise ContractError("empty prediction list")
    return preds, golds


def accuracy(preds, golds):
    preds, golds = _check(preds, golds)
    return float(np.mean(preds == golds))


def per_class_metrics(preds, golds, num_classes):
    """Per-class precision, recall, F1 and support; F1 = 0 when P + R = 0."""
    preds, golds = _check(preds, golds)
    rows = []
    for c in range(num_classes):
        tp = int(np.sum((preds == c) & (golds == c)))
        pred_c = int(np.sum(preds == c))
        gold_c = int(np.sum(golds == c))
        precision = tp / pred_c if pred_c else 0.0
        recall = tp / gold_c if gold_c else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        rows.append({"precision": precision, "recall": recall, "f1": f1, "support": gold_c})
    return rows


def weighted_f1(preds, golds, num_classes):
    """Support-weighted mean of per-class F1 scores."""
    rows = per_class_metrics(preds, golds, num_classes)
    n = len(np.asarray(golds))
    return float(sum(r["support"] / n * r["f1"] for r in rows))


@dataclass
class TaskMetrics:
    accuracy: float
    weighted_f1: float
    per_class: list  # dicts with precision/recall/f1/support

    def to_dict(self):
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "per_class": self.per_class,
        }


def task_metrics(preds, golds, num_classes):
    return TaskMetrics(
        accuracy=accuracy(preds, golds),
        weighted_f1=weighted_f1(preds, golds, num_classes),
        per_class=per_class_metrics(preds, golds, num_classes),
    )


@dataclass
class MetricsReport:
    """Evaluation summary for one run; a task entry is None when not reported."""

    sentiment: TaskMetrics | None
    intent: TaskMetrics | None
    n_samples: int
    config: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0
    label: str = ""

    def to_dict(self):
        return {
            "label": self.label,
            "n_samples": self.n_samples,
            "sentiment": self.sentiment.to_dict() if self.sentiment else None,
            "intent": self.intent.to_dict() if self.intent else None,
            "config": self.config,
            "runtime_seconds": self.runtime_seconds,
        }
