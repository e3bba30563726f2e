"""Back-projection of per-pixel class scores onto the points of the cloud.

Every point looks at the ``k x k`` window around its own pixel and takes a
Gaussian-weighted sum of the scores of the non-sparse pixels in it, weighting
each pixel by the 3D distance between the point and the point stored at that
pixel. The sum is divided by the number of pixels that voted.
"""
from __future__ import annotations


import numpy as np

from . import bev, spherical
from ._kernels import soft_vote
from .errors import ShapeMismatch
from .model import (
    BevConfig,
    PointCloud,
    PointScores,
    PostProcessConfig,
    ProjectedImage,
    ScoreMap,
    SphericalConfig,
)


def gaussian_weight(d, sigma: float):
    return np.exp(-np.square(d) / (2.0 * sigma * sigma))


def distance(p, q, metric: str = "manhattan"):
    """Distance between 3D points along the last axis (broadcasts)."""
    diff = np.asarray(p, dtype=np.float64)[..., :3] - np.asarray(q, dtype=np.float64)[..., :3]
    if metric == "euclidean":
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == "manhattan":
        return np.sum(np.abs(diff), axis=-1)
    raise ValueError(f"unknown metric {metric!r}")


def point_pixels(cloud: PointCloud, proj):
    """Pixel of every point under ``proj``: ``(rows, cols, has_pixel)``."""
    if isinstance(proj, SphericalConfig):
        rows, cols, _, ok = spherical.pixel_indices(cloud, proj)
        return rows, cols, ok
    if isinstance(proj, BevConfig):
        return bev.cell_indices(cloud, proj)
    raise TypeError(f"unsupported projection config {type(proj).__name__}")


def back_project(
    cloud: PointCloud,
    img: ProjectedImage,
    scores: ScoreMap,
    cfg: PostProcessConfig | None = None,
    proj=None,
) -> PointScores:
    """Soft-vote pixel scores back onto ``cloud``.

    ``proj`` is the :class:`SphericalConfig` or :class:`BevConfig` that
    produced ``img``; it defaults to the default config of ``img.view``.
    Points without a pixel (off the BEV grid, or at the origin) get a zero row.
    """
    cfg = cfg or PostProcessConfig()
    if proj is None:
        proj = SphericalConfig() if img.view == "spherical" else BevConfig()
    if scores.shape != img.shape:
        raise ShapeMismatch(f"score map is {scores.shape}, image is {img.shape}")
    if tuple(proj.shape) != img.shape:
        raise ShapeMismatch(f"projection config is {tuple(proj.shape)}, image is {img.shape}")
    wrap = cfg.wrap and isinstance(proj, SphericalConfig)

    rows, cols, has_pixel = point_pixels(cloud, proj)
    out = soft_vote(
        cloud.xyz, rows, cols, has_pixel, img.valid, img.xyz, scores.scores,
        cfg.k, 1.0 / (2.0 * cfg.sigma * cfg.sigma), cfg.metric == "manhattan", wrap,
    )
    out.setflags(write=False)
    return PointScores(out)
