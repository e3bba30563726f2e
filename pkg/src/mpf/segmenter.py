"""Score-map producers standing in for the per-view segmentation networks.

A segmenter is any callable ``(ProjectedImage) -> ScoreMap`` whose output has
the image's height and width and sums to one at valid pixels.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import LengthMismatch, MaskMismatch, ShapeMismatch
from .io import read_scores
from .model import LabelVector, ProjectedImage, ScoreMap

Segmenter = Callable[[ProjectedImage], ScoreMap]


def oracle_segment(img: ProjectedImage, labels: LabelVector, smoothing: float = 0.0) -> ScoreMap:
    """Label-smoothed one-hot scores of each pixel's source point; uniform at sparse pixels."""
    c = labels.n_classes
    if not 0.0 <= smoothing <= 1.0:
        raise ValueError("smoothing must lie in [0, 1]")
    if img.n_valid and img.source_index.max() >= len(labels):
        raise LengthMismatch(f"image references point {img.source_index.max()} but only {len(labels)} labels")
    h, w = img.shape
    off = smoothing / (c - 1) if c > 1 else 0.0
    scores = np.full((h, w, c), 1.0 / c, dtype=np.float32)
    rows, cols = np.nonzero(img.valid)
    lab = labels.labels[img.source_index[rows, cols]]
    scores[rows, cols] = off
    scores[rows, cols, lab] = 1.0 - smoothing if c > 1 else 1.0
    return ScoreMap(scores, img.valid)


class OracleSegmenter:
    """Callable wrapper of :func:`oracle_segment` bound to one scan's labels."""

    def __init__(self, labels: LabelVector, smoothing: float = 0.0):
        self.labels = labels
        self.smoothing = smoothing

    def __call__(self, img: ProjectedImage) -> ScoreMap:
        return oracle_segment(img, self.labels, self.smoothing)


def check_scores_match(img: ProjectedImage, scores: ScoreMap, n_classes: int | None = None) -> None:
    if scores.shape != img.shape:
        raise ShapeMismatch(f"score map is {scores.shape}, image is {img.shape}")
    if n_classes is not None and scores.n_classes != n_classes:
        raise ShapeMismatch(f"score map has {scores.n_classes} classes, expected {n_classes}")
    if not np.array_equal(scores.valid, img.valid):
        bad = np.argwhere(scores.valid != img.valid)
        raise MaskMismatch(f"{len(bad)} pixel(s) disagree, first at (row, col)={tuple(int(i) for i in bad[0])}")


def external_segment(img: ProjectedImage, path, n_classes: int | None = None) -> ScoreMap:
    """Load a network's MPFS output for ``img``; its mask must equal ``img.valid``."""
    scores = read_scores(path)
    check_scores_match(img, scores, n_classes)
    return scores
