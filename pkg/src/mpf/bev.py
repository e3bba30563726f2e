"""Bird's-eye view rasterization keeping the highest point per cell."""
from __future__ import annotations

import math

import numpy as np

from ._kernels import scatter_min
from .model import BEV, BEV_CHANNELS, BevConfig, PointCloud, ProjectedImage


def cell_coords(point, cfg: BevConfig):
    """``(row, col)`` of the cell containing ``point``, or None when it is off the grid.

    Lower edges are inclusive, upper edges exclusive.
    """
    x, y = float(point[0]), float(point[1])
    col = math.floor((x - cfg.x_min) * cfg.cols / (cfg.x_max - cfg.x_min))
    row = math.floor((y - cfg.y_min) * cfg.rows / (cfg.y_max - cfg.y_min))
    if 0 <= col < cfg.cols and 0 <= row < cfg.rows:
        return row, col
    return None


def cell_indices(cloud: PointCloud, cfg: BevConfig):
    """Vectorized :func:`cell_coords`; returns ``(rows, cols, ok)``."""
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    col = np.floor((x - cfg.x_min) * cfg.cols / (cfg.x_max - cfg.x_min))
    row = np.floor((y - cfg.y_min) * cfg.rows / (cfg.y_max - cfg.y_min))
    ok = (col >= 0) & (col < cfg.cols) & (row >= 0) & (row < cfg.rows)
    return np.where(ok, row, 0).astype(np.int64), np.where(ok, col, 0).astype(np.int64), ok


def project(cloud: PointCloud, cfg: BevConfig | None = None) -> ProjectedImage:
    """4-channel ``x, y, z, remission`` grid; per cell the max-z point wins, lowest index on ties."""
    cfg = cfg or BevConfig()
    h, w = cfg.shape
    rows, cols, ok = cell_indices(cloud, cfg)
    flat = np.where(ok, rows * w + cols, -1)
    src = scatter_min(-cloud.points[:, 2], flat, h * w)
    hit = src >= 0
    data = np.zeros((h * w, len(BEV_CHANNELS)))
    data[hit] = cloud.points[src[hit]]
    return ProjectedImage(data.reshape(h, w, -1), (src >= 0).reshape(h, w), src.reshape(h, w), BEV, BEV_CHANNELS)
