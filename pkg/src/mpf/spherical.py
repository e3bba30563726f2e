"""Spherical (range-image) projection of a 360 degree scan."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._kernels import scatter_min
from .errors import DegeneratePoint
from .model import SPHERICAL, SPHERICAL_CHANNELS, PointCloud, ProjectedImage, SphericalConfig


class SphericalCoords(NamedTuple):
    theta: float  # pitch
    phi: float  # yaw in (-pi, pi]
    r: float


class PixelCoords(NamedTuple):
    u: int  # column
    v: int  # row


def spherical_coords(point) -> SphericalCoords:
    x, y, z = (float(c) for c in point[:3])
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0.0:
        raise DegeneratePoint("point at the sensor origin has no direction")
    # rounding can push |z / r| past 1 for tiny coordinates
    return SphericalCoords(math.asin(min(max(z / r, -1.0), 1.0)), math.atan2(y, x), r)


def pixel_coords(s: SphericalCoords, cfg: SphericalConfig) -> PixelCoords:
    """Discretize yaw/pitch into image indices, clamped into the image.

    The row uses ``fov_down`` so that pitch ``fov_up`` lands on row 0 and pitch
    ``-fov_down`` on the bottom row.
    """
    u = math.floor(0.5 * (1.0 - s.phi / math.pi) * cfg.width)
    v = math.floor((1.0 - (s.theta + cfg.fov_down) / cfg.fov) * cfg.height)
    return PixelCoords(min(max(u, 0), cfg.width - 1), min(max(v, 0), cfg.height - 1))


def pixel_indices(cloud: PointCloud, cfg: SphericalConfig):
    """Vectorized :func:`pixel_coords` over a cloud.

    Returns ``(rows, cols, ranges, ok)`` where ``ok`` is false for points at
    the origin; their rows/cols are meaningless.
    """
    xyz = cloud.xyz
    r = cloud.range()
    ok = r > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.arcsin(np.clip(np.where(ok, xyz[:, 2] / np.where(ok, r, 1.0), 0.0), -1.0, 1.0))
    phi = np.arctan2(xyz[:, 1], xyz[:, 0])
    u = np.floor(0.5 * (1.0 - phi / np.pi) * cfg.width)
    v = np.floor((1.0 - (theta + cfg.fov_down) / cfg.fov) * cfg.height)
    cols = np.clip(u, 0, cfg.width - 1).astype(np.int64)
    rows = np.clip(v, 0, cfg.height - 1).astype(np.int64)
    return rows, cols, r, ok


def project(cloud: PointCloud, cfg: SphericalConfig | None = None) -> ProjectedImage:
    """Range image with channels ``x, y, z, range, remission``.

    Where several points fall on one pixel the closest wins; equal ranges go
    to the lowest point index.
    """
    cfg = cfg or SphericalConfig()
    h, w = cfg.shape
    rows, cols, r, ok = pixel_indices(cloud, cfg)
    flat = np.where(ok, rows * w + cols, -1)
    src = scatter_min(r, flat, h * w)
    hit = src >= 0
    idx = src[hit]
    data = np.zeros((h * w, len(SPHERICAL_CHANNELS)))
    data[hit, :3] = cloud.xyz[idx]
    data[hit, 3] = r[idx]
    data[hit, 4] = cloud.remission[idx]
    return ProjectedImage(
        data.reshape(h, w, -1), (src >= 0).reshape(h, w), src.reshape(h, w), SPHERICAL, SPHERICAL_CHANNELS
    )
