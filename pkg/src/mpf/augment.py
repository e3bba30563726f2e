"""Training-time augmentations for both views.

Every function takes an explicit ``numpy.random.Generator``; nothing draws
from global random state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import LabelVector, PointCloud, ProjectedImage


def translate(cloud: PointCloud, dx=0.0, dy=0.0, dz=0.0) -> PointCloud:
    pts = cloud.points.copy()
    pts[:, :3] += (dx, dy, dz)
    return PointCloud(pts)


def rotate_z(cloud: PointCloud, angle: float) -> PointCloud:
    c, s = math.cos(angle), math.sin(angle)
    pts = cloud.points.copy()
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    pts[:, 0] = c * x - s * y
    pts[:, 1] = s * x + c * y
    return PointCloud(pts)


def scale(cloud: PointCloud, factor: float) -> PointCloud:
    pts = cloud.points.copy()
    pts[:, :3] *= factor
    return PointCloud(pts)


def flip_y(cloud: PointCloud) -> PointCloud:
    """Mirror across the y axis (negates x)."""
    pts = cloud.points.copy()
    pts[:, 0] = -pts[:, 0]
    return PointCloud(pts)


def jitter_z(cloud: PointCloud, rng: np.random.Generator, std: float = 0.2) -> PointCloud:
    pts = cloud.points.copy()
    pts[:, 2] += rng.normal(0.0, std, size=len(pts))
    return PointCloud(pts)


@dataclass(frozen=True)
class SphericalCloudAugment:
    p_translate: float = 0.5
    p_rotate: float = 0.5
    p_scale: float = 0.5
    p_flip: float = 0.5
    translate_y: tuple = (-5.0, 5.0)
    rotation: tuple = (-math.pi, math.pi)
    scale: tuple = (0.95, 1.05)

    @classmethod
    def disabled(cls):
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class BevCloudAugment:
    p_rotate: float = 0.5
    p_scale: float = 0.5
    p_translate: float = 0.5
    p_noise: float = 0.5
    rotation: tuple = (-math.pi, math.pi)
    scale: tuple = (0.95, 1.05)
    translate_xy: tuple = (-5.0, 5.0)
    z_noise_std: float = 0.2

    @classmethod
    def disabled(cls):
        return cls(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SphericalImageAugment:
    """CoarseDropout followed by a half-width horizontal crop.

    Dropout works on a coarse grid of ``block_h x block_w`` blocks (block size
    drawn per call from the given ranges); each block is dropped with
    probability ``dropout``, so the expected dropped pixel fraction equals
    ``dropout``. ``crop_start`` fixes the crop column; None samples it.
    """

    dropout: float = 0.005
    block_h: tuple = (1, 4)
    block_w: tuple = (1, 8)
    crop: bool = True
    crop_start: int | None = None


def augment_cloud_spherical(cloud: PointCloud, labels: LabelVector, rng: np.random.Generator,
                            params: SphericalCloudAugment = SphericalCloudAugment()):
    """Translate along y, rotate about z, scale, flip; each independently with its probability."""
    if rng.random() < params.p_translate:
        cloud = translate(cloud, dy=rng.uniform(*params.translate_y))
    if rng.random() < params.p_rotate:
        cloud = rotate_z(cloud, rng.uniform(*params.rotation))
    if rng.random() < params.p_scale:
        cloud = scale(cloud, rng.uniform(*params.scale))
    if rng.random() < params.p_flip:
        cloud = flip_y(cloud)
    return cloud, labels


def augment_cloud_bev(cloud: PointCloud, labels: LabelVector, rng: np.random.Generator,
                      params: BevCloudAugment = BevCloudAugment()):
    """Rotate about z, scale, translate in x/y, add Gaussian z noise; each with its probability."""
    if rng.random() < params.p_rotate:
        cloud = rotate_z(cloud, rng.uniform(*params.rotation))
    if rng.random() < params.p_scale:
        cloud = scale(cloud, rng.uniform(*params.scale))
    if rng.random() < params.p_translate:
        cloud = translate(cloud, rng.uniform(*params.translate_xy), rng.uniform(*params.translate_xy))
    if rng.random() < params.p_noise:
        cloud = jitter_z(cloud, rng, params.z_noise_std)
    return cloud, labels


def coarse_dropout_mask(shape, rng, p, block_h=(1, 4), block_w=(1, 8)) -> np.ndarray:
    """Boolean mask of dropped pixels."""
    h, w = shape
    bh = int(rng.integers(block_h[0], block_h[1] + 1))
    bw = int(rng.integers(block_w[0], block_w[1] + 1))
    coarse = rng.random((-(-h // bh), -(-w // bw))) < p
    return np.repeat(np.repeat(coarse, bh, axis=0), bw, axis=1)[:h, :w]


def augment_image_spherical(img: ProjectedImage, rng: np.random.Generator,
                            params: SphericalImageAugment = SphericalImageAugment()) -> ProjectedImage:
    h, w = img.shape
    data = img.data.copy()
    src = img.source_index.copy()
    if params.dropout > 0:
        drop = coarse_dropout_mask((h, w), rng, params.dropout, params.block_h, params.block_w)
        data[drop] = 0.0
        src[drop] = -1
    if params.crop:
        start = params.crop_start if params.crop_start is not None else int(rng.integers(0, w))
        cols = (start + np.arange(w // 2)) % w
        data, src = data[:, cols], src[:, cols]
    return ProjectedImage(data, src >= 0, src, img.view, img.channels)
