"""Classification metrics with ``bot`` as the positive class."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import IO, Optional, Sequence

import numpy as np
from sklearn.metrics import auc as _trapezoid_auc
from sklearn.metrics import roc_curve

POSITIVE = "bot"


@dataclass
class Metrics:
    tp: int
    tn: int
    fp: int
    fn: int
    acc: float
    precision: float
    recall: float
    f1: float
    auc: Optional[float] = None

    def to_json(self) -> dict:
        return asdict(self)


def metrics_from_counts(tp: int, tn: int, fp: int, fn: int, auc: Optional[float] = None) -> Metrics:
    total = tp + tn + fp + fn
    acc = (tp + tn) / total if total else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(tp, tn, fp, fn, acc, precision, recall, f1, auc)


def confusion_metrics(pred: Sequence[str], truth: Sequence[str]) -> Metrics:
    if len(pred) != len(truth):
        raise ValueError(f"length mismatch: {len(pred)} predictions, {len(truth)} labels")
    if len(pred) == 0:
        raise ValueError("no predictions")
    p = np.asarray(pred) == POSITIVE
    t = np.asarray(truth) == POSITIVE
    return metrics_from_counts(int((p & t).sum()), int((~p & ~t).sum()),
                               int((p & ~t).sum()), int((~p & t).sum()))


def roc_points(scores: Sequence[float], truth: Sequence[str]) -> tuple[list[tuple[float, float]], float]:
    """ROC curve over every distinct score, tied scores forming one step."""
    if len(scores) != len(truth):
        raise ValueError("length mismatch")
    y = (np.asarray(truth) == POSITIVE).astype(int)
    if y.min(initial=1) == y.max(initial=0):
        raise ValueError("AUC undefined: truth has a single class")
    fpr, tpr, _ = roc_curve(y, np.asarray(scores, dtype=float), drop_intermediate=False)
    return list(zip(fpr.tolist(), tpr.tolist())), float(_trapezoid_auc(fpr, tpr))


def write_roc_csv(points, fh: IO[str]) -> None:
    fh.write("fpr,tpr\n")
    for f, t in points:
        fh.write(f"{f:.6f},{t:.6f}\n")
