"""Input coercion for the estimator layer."""
from __future__ import annotations

import numpy as np

from .model import N_CLASSES, VIEWS, LabelVector, PointCloud


def check_cloud(X) -> PointCloud:
    """Accept a PointCloud or an ``(N, 3)`` / ``(N, 4)`` array (remission defaults to 0)."""
    if isinstance(X, PointCloud):
        return X
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] not in (3, 4):
        raise ValueError(f"expected a PointCloud or an (N, 3)/(N, 4) array, got shape {arr.shape}")
    if arr.shape[1] == 3:
        return PointCloud.from_xyz(arr)
    return PointCloud(arr)


def check_labels(y, cloud: PointCloud | None = None, n_classes: int = N_CLASSES) -> LabelVector:
    labels = y if isinstance(y, LabelVector) else LabelVector(np.asarray(y), n_classes)
    if cloud is not None:
        labels.check_matches(cloud)
    return labels


def check_views(views) -> tuple:
    views = (views,) if isinstance(views, str) else tuple(views)
    if not views:
        raise ValueError("at least one view is required")
    for v in views:
        if v not in VIEWS:
            raise ValueError(f"unknown view {v!r}; expected one of {VIEWS}")
    if len(set(views)) != len(views):
        raise ValueError("views must not repeat")
    return views


def check_extent(extent) -> tuple:
    """``E`` means ``[-E, E]`` on both axes; four values are ``x_min, x_max, y_min, y_max``."""
    if np.isscalar(extent):
        e = float(extent)
        return (-e, e, -e, e)
    extent = tuple(float(v) for v in extent)
    if len(extent) == 1:
        return (-extent[0], extent[0], -extent[0], extent[0])
    if len(extent) != 4:
        raise ValueError("extent takes one value or four values")
    return extent
