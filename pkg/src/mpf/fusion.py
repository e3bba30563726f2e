"""Combining per-view point scores and turning them into labels."""
from __future__ import annotations

import numpy as np

from ._kernels import argmax_rows
from .errors import ShapeMismatch
from .model import IGNORE_CLASS, LabelVector, PointScores


def fuse(*views: PointScores) -> PointScores:
    """Elementwise sum of per-point scores from any number of views."""
    if len(views) == 1 and isinstance(views[0], (list, tuple)):
        views = tuple(views[0])
    if not views:
        raise ValueError("need at least one view to fuse")
    shape = views[0].scores.shape
    for v in views[1:]:
        if v.scores.shape != shape:
            raise ShapeMismatch(f"cannot fuse scores of shape {v.scores.shape} with {shape}")
    total = views[0].scores.copy()
    for v in views[1:]:
        total += v.scores
    total.setflags(write=False)
    return PointScores(total, n_views=sum(v.n_views for v in views))


def predict(scores: PointScores, ignore_class: int | None = IGNORE_CLASS) -> LabelVector:
    """Per-point argmax, skipping ``ignore_class``; ties go to the lowest class id.

    Points whose row is all zero (seen by no view) are labelled ``ignore_class``
    (or 0 when nothing is ignored).
    """
    fill = IGNORE_CLASS if ignore_class is None else ignore_class
    labels = argmax_rows(scores.scores, -1 if ignore_class is None else ignore_class, fill)
    labels.setflags(write=False)
    return LabelVector(labels, scores.n_classes)
