"""Synthetic labelled LiDAR scans of a street scene.

A 64-beam scanner (Velodyne HDL-64E-like beam layout, mounted 1.73 m above
the ground) is ray-cast against a randomized street: road, sidewalks and
terrain on the ground plane, plus cars, people, poles, trunks with canopies,
fences and buildings. Labels are training ids of the default class map.
Scans are roughly 100k points, comparable to a SemanticKITTI scan.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .io import default_class_map, write_labels, write_scan
from .model import LabelVector, PointCloud

SENSOR_HEIGHT = 1.73

# training ids of the default class map
CAR, BICYCLE, PERSON, ROAD, PARKING, SIDEWALK = 1, 2, 6, 9, 10, 11
BUILDING, FENCE, VEGETATION, TRUNK, TERRAIN, POLE, SIGN = 13, 14, 15, 16, 17, 18, 19

_REMISSION = {CAR: 0.25, BICYCLE: 0.3, PERSON: 0.2, ROAD: 0.15, PARKING: 0.2, SIDEWALK: 0.3,
              BUILDING: 0.35, FENCE: 0.3, VEGETATION: 0.4, TRUNK: 0.3, TERRAIN: 0.45,
              POLE: 0.5, SIGN: 0.9}


def hdl64_elevations() -> np.ndarray:
    """Beam pitch angles in radians: a dense upper block and a sparser lower block."""
    upper = np.linspace(2.0, -8.33, 32)
    lower = np.linspace(-8.83, -24.33, 32)
    return np.radians(np.concatenate([upper, lower]))


@dataclass
class _Scene:
    boxes: list  # (lo xyz, hi xyz, label)
    cylinders: list  # (cx, cy, radius, z_lo, z_hi, label)
    road_half: float
    sidewalk_half: float
    parking: tuple  # (x_lo, x_hi) strip beside the road on +y


def _random_scene(rng: np.random.Generator) -> _Scene:
    g = -SENSOR_HEIGHT
    road_half = rng.uniform(4.0, 7.0)
    sidewalk_half = road_half + rng.uniform(2.0, 4.0)
    boxes, cylinders = [], []
    # parked and moving cars along both lanes
    for _ in range(rng.integers(6, 14)):
        x = rng.uniform(-60, 60)
        y = rng.choice([-1, 1]) * rng.uniform(1.5, road_half - 1.0)
        if abs(x) < 4 and abs(y) < 2.5:
            continue
        ln, wd, ht = rng.uniform(3.8, 4.8), rng.uniform(1.6, 1.9), rng.uniform(1.3, 1.7)
        boxes.append((np.array([x - ln / 2, y - wd / 2, g]), np.array([x + ln / 2, y + wd / 2, g + ht]), CAR))
    for _ in range(rng.integers(2, 6)):
        x = rng.uniform(-30, 30)
        y = rng.choice([-1, 1]) * rng.uniform(road_half, sidewalk_half)
        boxes.append((np.array([x - 0.25, y - 0.25, g]), np.array([x + 0.25, y + 0.25, g + 1.75]), PERSON))
    if rng.random() < 0.5:
        x = rng.uniform(-25, 25)
        y = rng.choice([-1, 1]) * rng.uniform(2.0, road_half)
        boxes.append((np.array([x - 0.9, y - 0.3, g]), np.array([x + 0.9, y + 0.3, g + 1.1]), BICYCLE))
    # building facades and fences behind the sidewalks
    for side in (-1, 1):
        x = -80.0
        while x < 80:
            length = rng.uniform(10, 30)
            setback = sidewalk_half + rng.uniform(3, 12)
            if rng.random() < 0.7:
                depth, height = rng.uniform(8, 15), rng.uniform(5, 20)
                y0, y1 = sorted((side * setback, side * (setback + depth)))
                boxes.append((np.array([x, y0, g]), np.array([x + length, y1, g + height]), BUILDING))
            else:
                y0, y1 = sorted((side * setback, side * (setback + 0.1)))
                boxes.append((np.array([x, y0, g]), np.array([x + length, y1, g + 1.5]), FENCE))
            x += length + rng.uniform(2, 8)
    # poles, signs and trees on the sidewalks
    for x in np.arange(-60, 60, rng.uniform(12, 20)):
        side = rng.choice([-1, 1])
        y = side * (road_half + 0.5)
        cylinders.append((x, y, 0.12, g, g + 6.0, POLE))
        if rng.random() < 0.3:
            boxes.append((np.array([x - 0.05, y - 0.4, g + 2.0]), np.array([x + 0.05, y + 0.4, g + 2.8]), SIGN))
    for x in np.arange(-70, 70, rng.uniform(8, 14)):
        y = rng.choice([-1, 1]) * (sidewalk_half - 0.8)
        cylinders.append((x, y, rng.uniform(0.15, 0.35), g, g + 3.0, TRUNK))
        r = rng.uniform(1.5, 3.0)
        boxes.append((np.array([x - r, y - r, g + 3.0]), np.array([x + r, y + r, g + 3.0 + 2 * r]), VEGETATION))
    parking = tuple(sorted(rng.uniform(-40, 40, size=2)))
    return _Scene(boxes, cylinders, road_half, sidewalk_half, parking)


def _ray_box(d, lo, hi):
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / d
        t1, t2 = lo * inv, hi * inv
    tmin = np.nanmax(np.minimum(t1, t2), axis=1)
    tmax = np.nanmin(np.maximum(t1, t2), axis=1)
    hit = (tmax >= np.maximum(tmin, 0.0)) & (tmin > 0)
    return np.where(hit, tmin, np.inf)


def _ray_cylinder(d, cx, cy, radius, z_lo, z_hi):
    a = d[:, 0] ** 2 + d[:, 1] ** 2
    b = -2.0 * (d[:, 0] * cx + d[:, 1] * cy)
    c = cx * cx + cy * cy - radius * radius
    disc = b * b - 4 * a * c
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (-b - np.sqrt(disc)) / (2 * a)
    z = t * d[:, 2]
    ok = (disc >= 0) & (t > 0) & (z >= z_lo) & (z <= z_hi)
    return np.where(ok, t, np.inf)


def make_scan(seed: int = 0, n_azimuth: int = 1800, max_range: float = 80.0,
              range_noise: float = 0.02, drop: float = 0.05):
    """Return ``(PointCloud, LabelVector)`` for a random street scene."""
    rng = np.random.default_rng(seed)
    scene = _random_scene(rng)
    elev = hdl64_elevations()
    # per-beam azimuth offsets, as on a real multi-laser head
    az = np.linspace(-np.pi, np.pi, n_azimuth, endpoint=False)[None, :] + rng.uniform(-0.003, 0.003, (64, 1))
    el = np.broadcast_to(elev[:, None], az.shape)
    d = np.stack([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)], axis=-1).reshape(-1, 3)

    t_best = np.full(len(d), np.inf)
    label = np.zeros(len(d), dtype=np.int64)
    with np.errstate(divide="ignore"):
        t_ground = np.where(d[:, 2] < 0, -SENSOR_HEIGHT / d[:, 2], np.inf)
    t_best[:] = t_ground
    gx, gy = t_ground * d[:, 0], np.abs(t_ground * d[:, 1])
    ground = np.where(gy < scene.road_half, ROAD, np.where(gy < scene.sidewalk_half, SIDEWALK, TERRAIN))
    in_parking = (gy >= scene.road_half - 2.5) & (gy < scene.road_half) & (gx > scene.parking[0]) & (gx < scene.parking[1])
    label[:] = np.where(in_parking, PARKING, ground)
    for lo, hi, lab in scene.boxes:
        t = _ray_box(d, lo, hi)
        closer = t < t_best
        t_best[closer], label[closer] = t[closer], lab
    for cx, cy, r, z_lo, z_hi, lab in scene.cylinders:
        t = _ray_cylinder(d, cx, cy, r, z_lo, z_hi)
        closer = t < t_best
        t_best[closer], label[closer] = t[closer], lab

    keep = (t_best < max_range) & (rng.random(len(d)) >= drop)
    t = t_best[keep] + rng.normal(0.0, range_noise, keep.sum())
    xyz = d[keep] * t[:, None]
    label = label[keep]
    base = np.array([_REMISSION[int(c)] for c in label])
    rem = np.clip(base + rng.normal(0, 0.05, len(base)), 0.0, 1.0)
    # beam-major point order, as in the dataset's files
    pts = np.column_stack([xyz, rem]).astype(np.float32)
    return PointCloud(pts), LabelVector(label)


def write_sequence(root, n_scans: int = 10, sequence: str = "08", seed: int = 0, **kwargs) -> str:
    """Write scans in SemanticKITTI layout under ``root``; returns the sequence directory."""
    seq_dir = os.path.join(root, "sequences", sequence)
    os.makedirs(os.path.join(seq_dir, "velodyne"), exist_ok=True)
    os.makedirs(os.path.join(seq_dir, "labels"), exist_ok=True)
    train_to_raw = default_class_map().train_to_raw
    for i in range(n_scans):
        cloud, labels = make_scan(seed + i, **kwargs)
        scan_id = f"{i:06d}"
        write_scan(os.path.join(seq_dir, "velodyne", scan_id + ".bin"), cloud)
        raw = np.array([train_to_raw[int(c)] for c in labels.labels], dtype=np.uint32)
        write_labels(os.path.join(seq_dir, "labels", scan_id + ".label"), raw)
    return seq_dir
