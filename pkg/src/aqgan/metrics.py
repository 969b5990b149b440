"""ROC curves, trapezoidal AUC, and confusion-matrix metrics."""

from dataclasses import dataclass

import numpy as np


def roc_auc(scores, is_anomaly, direction="higher-is-positive"):
    """ROC points and trapezoidal AUC with the anomaly class as positive.

    Thresholds sweep the distinct score values; equal scores collapse into a
    single step, which makes the trapezoidal area equal the Mann-Whitney
    pairwise statistic with ties counted one half.

    Returns (points, auc) where points is an (K, 3) array of
    (fpr, tpr, threshold) from (0, 0) to (1, 1).
    """
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(is_anomaly, dtype=bool)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be matching 1-D arrays")
    if not np.all(np.isfinite(scores)):
        raise ValueError("non-finite score")
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one sample of each class")
    if direction == "lower-is-positive":
        s = -scores
        back = -1.0
    elif direction == "higher-is-positive":
        s = scores
        back = 1.0
    else:
        raise ValueError(f"unknown direction {direction!r}")

    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    t_sorted = truth[order]
    # group ties: cut after the last occurrence of each distinct value
    cuts = np.nonzero(np.diff(s_sorted))[0]
    ends = np.concatenate([cuts, [len(s_sorted) - 1]])
    tp = np.cumsum(t_sorted)[ends]
    fp = np.cumsum(~t_sorted)[ends]
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    thresholds = np.concatenate([[np.inf], s_sorted[ends]]) * back
    auc = float(np.trapezoid(tpr, fpr))
    points = np.column_stack([fpr, tpr, thresholds])
    return points, auc


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int  # true anomalies
    fp: int  # false anomalies
    fn: int  # false non-anomalies
    tn: int  # true non-anomalies

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn

    @classmethod
    def from_predictions(cls, predicted_anomaly, is_anomaly):
        p = np.asarray(predicted_anomaly, dtype=bool)
        t = np.asarray(is_anomaly, dtype=bool)
        return cls(
            tp=int(np.sum(p & t)),
            fp=int(np.sum(p & ~t)),
            fn=int(np.sum(~p & t)),
            tn=int(np.sum(~p & ~t)),
        )


@dataclass(frozen=True)
class MetricSet:
    accuracy: float  # conventional (TP+TN)/total
    accuracy_tp_over_total: float  # the alternative TP/total form
    precision: float
    recall: float
    f1: float
    degenerate: bool  # a precision/recall denominator was zero


def confusion_metrics(counts):
    """Accuracy/precision/recall/F1.

    Both accuracy forms are reported: the conventional (TP+TN)/total and the
    TP/total variant.  Zero denominators yield 0 with the degenerate flag.
    """
    if counts.total == 0:
        raise ValueError("no events")
    degenerate = False
    if counts.tp + counts.fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = counts.tp / (counts.tp + counts.fp)
    if counts.tp + counts.fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = counts.tp / (counts.tp + counts.fn)
    if precision + recall == 0.0:
        f1, degenerate = 0.0, True
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return MetricSet(
        accuracy=(counts.tp + counts.tn) / counts.total,
        accuracy_tp_over_total=counts.tp / counts.total,
        precision=precision,
        recall=recall,
        f1=f1,
        degenerate=degenerate,
    )
