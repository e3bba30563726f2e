"""Segmentation metrics and loss diagnostics."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import AllUndefined, DomainError, LengthMismatch, ShapeMismatch
from .model import IGNORE_CLASS, N_CLASSES, LabelVector, PointCloud, PointScores, ScoreMap


def _labels(x) -> np.ndarray:
    return x.labels if isinstance(x, LabelVector) else np.asarray(x, dtype=np.int64)


class ConfusionMatrix:
    """Point counts indexed ``[ground_truth, prediction]``.

    Points whose ground truth is ``ignore_class`` are never counted. Matrices
    built on disjoint shards can be combined with :meth:`merge`.
    """

    def __init__(self, n_classes: int = N_CLASSES, ignore_class: int | None = IGNORE_CLASS):
        self.n_classes = n_classes
        self.ignore_class = ignore_class
        self.counts = np.zeros((n_classes, n_classes), dtype=np.int64)

    def accumulate(self, pred, gt) -> ConfusionMatrix:
        pred, gt = _labels(pred), _labels(gt)
        if pred.shape != gt.shape:
            raise LengthMismatch(f"{len(pred)} predictions for {len(gt)} ground-truth labels")
        keep = gt != self.ignore_class if self.ignore_class is not None else slice(None)
        flat = gt[keep] * self.n_classes + pred[keep]
        self.counts += np.bincount(flat, minlength=self.n_classes ** 2).reshape(self.n_classes, -1)
        return self

    def merge(self, other: ConfusionMatrix) -> ConfusionMatrix:
        if other.counts.shape != self.counts.shape:
            raise ShapeMismatch("confusion matrices have different class counts")
        self.counts += other.counts
        return self

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def evaluated_classes(self) -> list:
        return [c for c in range(self.n_classes) if c != self.ignore_class]

    def stats(self, c: int):
        """``(tp, fp, fn)`` for class ``c``."""
        tp = int(self.counts[c, c])
        return tp, int(self.counts[:, c].sum()) - tp, int(self.counts[c, :].sum()) - tp

    def iou(self, c: int):
        """IoU of class ``c``, or None when the class is absent from prediction and truth."""
        tp, fp, fn = self.stats(c)
        union = tp + fp + fn
        return tp / union if union else None

    def per_class_iou(self) -> np.ndarray:
        """IoU for every class id; NaN where undefined or ignored."""
        out = np.full(self.n_classes, np.nan)
        for c in self.evaluated_classes():
            v = self.iou(c)
            if v is not None:
                out[c] = v
        return out

    def miou(self) -> float:
        vals = [v for v in (self.iou(c) for c in self.evaluated_classes()) if v is not None]
        if not vals:
            raise AllUndefined("no evaluated class occurs in prediction or ground truth")
        return sum(vals) / len(vals)

    def accuracy(self):
        total = self.total
        return float(np.trace(self.counts)) / total if total else None


def confusion_matrix(pred, gt, n_classes=N_CLASSES, ignore_class=IGNORE_CLASS) -> ConfusionMatrix:
    return ConfusionMatrix(n_classes, ignore_class).accumulate(pred, gt)


@dataclass(frozen=True)
class DistanceBin:
    start: float
    end: float
    n_points: int  # every point in the bin, for the point-count histogram
    count: int  # points with a non-ignored ground-truth label
    correct: int
    accuracy: float | None
    miou: float | None


class DistanceBinner:
    """Per-bin confusion matrices over planar range ``[k*w, (k+1)*w)``.

    Bins grow as farther points arrive; binners over disjoint shards merge.
    """

    def __init__(self, bin_width=10.0, n_classes=N_CLASSES, ignore_class=IGNORE_CLASS, max_range=None):
        if not bin_width > 0:
            raise ValueError("bin_width must be positive")
        self.bin_width = bin_width
        self.n_classes = n_classes
        self.ignore_class = ignore_class
        self.matrices = []
        self.n_points = []
        if max_range is not None:
            self._grow(int(math.floor(max_range / bin_width)) + 1)

    def _grow(self, n_bins):
        while len(self.matrices) < n_bins:
            self.matrices.append(ConfusionMatrix(self.n_classes, self.ignore_class))
            self.n_points.append(0)

    def accumulate(self, cloud: PointCloud, pred, gt) -> DistanceBinner:
        pred, gt = _labels(pred), _labels(gt)
        if not (len(pred) == len(gt) == len(cloud)):
            raise LengthMismatch("cloud, prediction and ground truth must have equal length")
        k = np.floor(cloud.planar_range() / self.bin_width).astype(np.int64)
        self._grow(int(k.max()) + 1 if len(k) else 1)
        order = np.argsort(k, kind="stable")
        k, pred, gt = k[order], pred[order], gt[order]
        edges = np.searchsorted(k, np.arange(len(self.matrices) + 1))
        for b in range(len(self.matrices)):
            lo, hi = edges[b], edges[b + 1]
            self.n_points[b] += int(hi - lo)
            self.matrices[b].accumulate(pred[lo:hi], gt[lo:hi])
        return self

    def merge(self, other: DistanceBinner) -> DistanceBinner:
        if other.bin_width != self.bin_width:
            raise ValueError("cannot merge binners with different bin widths")
        self._grow(len(other.matrices))
        for b, (cm, n) in enumerate(zip(other.matrices, other.n_points)):
            self.matrices[b].merge(cm)
            self.n_points[b] += n
        return self

    def bins(self) -> list:
        out = []
        for b, (cm, n) in enumerate(zip(self.matrices, self.n_points)):
            count = cm.total
            correct = int(np.trace(cm.counts))
            try:
                miou = cm.miou()
            except AllUndefined:
                miou = None
            out.append(DistanceBin(
                b * self.bin_width, (b + 1) * self.bin_width, n, count, correct,
                correct / count if count else None, miou,
            ))
        return out


def binned_accuracy(
    cloud: PointCloud,
    pred,
    gt,
    bin_width: float = 10.0,
    n_classes: int = N_CLASSES,
    ignore_class: int | None = IGNORE_CLASS,
    max_range: float | None = None,
) -> list:
    """Point accuracy and mIoU per planar-range bin of width ``bin_width``.

    Bins run from 0 up to the bin holding the farthest point (at least up to
    ``max_range``); empty bins are reported with ``accuracy=None``.
    """
    binner = DistanceBinner(bin_width, n_classes, ignore_class, max_range)
    return binner.accumulate(cloud, pred, gt).bins()


def _true_class_probs(scores, gt, ignore_class):
    if isinstance(scores, ScoreMap):
        probs, mask = scores.scores.astype(np.float64), scores.valid
        gt = np.asarray(_labels(gt) if not isinstance(gt, np.ndarray) else gt)
        if gt.shape != mask.shape:
            raise ShapeMismatch(f"ground truth {gt.shape} does not match score map {mask.shape}")
        probs, gt = probs[mask], gt[mask]
    else:
        probs = scores.scores if isinstance(scores, PointScores) else np.asarray(scores, dtype=np.float64)
        gt = _labels(gt)
        if len(gt) != len(probs):
            raise LengthMismatch(f"{len(gt)} labels for {len(probs)} score rows")
    gt = np.asarray(gt, dtype=np.int64)
    if ignore_class is not None:
        keep = gt != ignore_class
        probs, gt = probs[keep], gt[keep]
    p = probs[np.arange(len(gt)), gt]
    if (p <= 0).any():
        raise DomainError("ground-truth class probability is zero")
    return p


def focal_loss(scores, gt, gamma: float = 2.0, ignore_class=None, reduction: str = "sum") -> float:
    """Sum (or mean) over elements of ``-(1 - p)**gamma * log(p)``.

    ``p`` is the probability assigned to the ground-truth class. ``scores`` is
    an ``(N, C)`` array, :class:`PointScores`, or :class:`ScoreMap` (with an
    ``(H, W)`` label image; sparse pixels are skipped).
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    p = _true_class_probs(scores, gt, ignore_class)
    terms = -np.power(1.0 - p, gamma) * np.log(p)
    if reduction == "sum":
        return float(terms.sum())
    if reduction == "mean":
        return float(terms.mean()) if len(terms) else 0.0
    raise ValueError("reduction must be 'sum' or 'mean'")


def cross_entropy(scores, gt, ignore_class=None, reduction: str = "sum") -> float:
    return focal_loss(scores, gt, 0.0, ignore_class, reduction)


def write_iou_csv(path, cm: ConfusionMatrix, class_names) -> None:
    """One row per evaluated class in class-id order (car ... traffic-sign)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["class_id", "class_name", "iou", "tp", "fp", "fn"])
        for c in cm.evaluated_classes():
            tp, fp, fn = cm.stats(c)
            v = cm.iou(c)
            w.writerow([c, class_names[c], "" if v is None else f"{v:.10f}", tp, fp, fn])


def write_bins_csv(path, bins_by_view: dict) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["view", "bin_start", "bin_end", "n_points", "count", "correct", "accuracy", "miou"])
        for view, bins in bins_by_view.items():
            for b in bins:
                w.writerow([
                    view, f"{b.start:g}", f"{b.end:g}", b.n_points, b.count, b.correct,
                    "" if b.accuracy is None else f"{b.accuracy:.10f}",
                    "" if b.miou is None else f"{b.miou:.10f}",
                ])
