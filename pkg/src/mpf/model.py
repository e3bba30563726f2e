"""Core value types shared by the projection, post-processing and evaluation code.

All types are frozen; array fields are stored as read-only numpy arrays so a
value can be shared between threads without copying.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidScores, LengthMismatch, NonFiniteCoordinate, ShapeMismatch

N_CLASSES = 20
IGNORE_CLASS = 0

SPHERICAL = "spherical"
BEV = "bev"
VIEWS = (SPHERICAL, BEV)

SPHERICAL_CHANNELS = ("x", "y", "z", "range", "remission")
BEV_CHANNELS = ("x", "y", "z", "remission")

METRICS = ("euclidean", "manhattan")

SCORE_SUM_TOL = 1e-5


def _frozen(a, dtype=None):
    a = np.asarray(a, dtype=dtype)
    base = a.base
    # read-only arrays over read-only memory can be adopted without a copy
    if a.flags.writeable or (isinstance(base, np.ndarray) and base.flags.writeable):
        a = a.copy()
    a.setflags(write=False)
    return a


def validate(points) -> None:
    """Raise :class:`NonFiniteCoordinate` for the first point with a NaN/Inf field.

    Accepts a :class:`PointCloud` or an ``(N, 4)`` array.
    """
    if isinstance(points, PointCloud):
        points = points.points
    points = np.asarray(points)
    if points.ndim != 2 or points.shape[1] != 4:
        raise ShapeMismatch(f"expected (N, 4) points, got shape {points.shape}")
    bad = ~np.isfinite(points).all(axis=1)
    if bad.any():
        raise NonFiniteCoordinate(int(np.flatnonzero(bad)[0]))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """N points as an ``(N, 4)`` float64 array of ``x, y, z, remission``.

    Point order is meaningful: projections break ties by original index.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1 and pts.size == 0:
            pts = pts.reshape(0, 4)
        validate(pts)
        object.__setattr__(self, "points", _frozen(pts))

    @classmethod
    def from_xyz(cls, xyz, remission=None) -> PointCloud:
        xyz = np.asarray(xyz, dtype=np.float64).reshape(-1, 3)
        rem = np.zeros(len(xyz)) if remission is None else np.asarray(remission, dtype=np.float64)
        return cls(np.column_stack([xyz, rem]))

    def __len__(self):
        return self.points.shape[0]

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def remission(self) -> np.ndarray:
        return self.points[:, 3]

    def range(self) -> np.ndarray:
        # summed left to right, matching the scalar formula bit for bit
        x, y, z = self.points[:, 0], self.points[:, 1], self.points[:, 2]
        return np.sqrt(x * x + y * y + z * z)

    def planar_range(self) -> np.ndarray:
        return np.hypot(self.points[:, 0], self.points[:, 1])


@dataclass(frozen=True, eq=False)
class LabelVector:
    labels: np.ndarray
    n_classes: int = N_CLASSES

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.size == 0:
            lab = lab.reshape(0)
        if lab.ndim != 1:
            raise ShapeMismatch(f"labels must be 1-D, got shape {lab.shape}")
        if lab.size and not np.issubdtype(lab.dtype, np.integer):
            if not np.all(lab == np.round(lab)):
                raise ValueError("labels must be integers")
        lab = lab.astype(np.int64, copy=False)
        if lab.size and (lab.min() < 0 or lab.max() >= self.n_classes):
            raise ValueError(f"labels must lie in [0, {self.n_classes - 1}]")
        object.__setattr__(self, "labels", _frozen(lab))

    def __len__(self):
        return self.labels.shape[0]

    def check_matches(self, cloud: PointCloud) -> None:
        if len(self) != len(cloud):
            raise LengthMismatch(f"{len(self)} labels for a cloud of {len(cloud)} points")


@dataclass(frozen=True, eq=False)
class ProjectedImage:
    """A rasterized view of a cloud.

    ``data`` is ``(H, W, n_channels)``; ``source_index`` holds the index of the
    point stored at each pixel, or -1 for sparse pixels. Sparse pixels carry
    zero channels.
    """

    data: np.ndarray
    valid: np.ndarray
    source_index: np.ndarray
    view: str = SPHERICAL
    channels: tuple = SPHERICAL_CHANNELS

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        valid = np.asarray(self.valid, dtype=bool)
        src = np.asarray(self.source_index, dtype=np.int64)
        if data.ndim != 3 or data.shape[:2] != valid.shape or valid.shape != src.shape:
            raise ShapeMismatch("data, valid and source_index must share H x W")
        if data.shape[2] != len(self.channels):
            raise ShapeMismatch(f"{data.shape[2]} channels, expected {len(self.channels)}")
        if not np.array_equal(valid, src >= 0):
            raise ValueError("valid mask must equal source_index >= 0")
        used = src[valid]
        if used.size and np.bincount(used).max() > 1:
            raise ValueError("a point is stored in more than one pixel")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "valid", _frozen(valid))
        object.__setattr__(self, "source_index", _frozen(src))
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def shape(self) -> tuple:
        return self.valid.shape

    @property
    def xyz(self) -> np.ndarray:
        return self.data[..., :3]

    @property
    def n_valid(self) -> int:
        return int(self.valid.sum())


@dataclass(frozen=True, eq=False)
class ScoreMap:
    """Per-pixel class probabilities, ``(H, W, C)`` float32, plus validity mask."""

    scores: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float32)
        valid = np.asarray(self.valid, dtype=bool)
        if scores.ndim != 3 or scores.shape[:2] != valid.shape:
            raise ShapeMismatch(f"scores {scores.shape} and mask {valid.shape} disagree")
        if not np.isfinite(scores).all() or (scores < 0).any():
            raise InvalidScores("scores must be finite and non-negative")
        if valid.any() and scores.shape[2] > 0:
            sums = scores[valid].sum(axis=1, dtype=np.float64)
            if np.abs(sums - 1.0).max() > SCORE_SUM_TOL:
                raise InvalidScores("scores at valid pixels must sum to 1")
        object.__setattr__(self, "scores", _frozen(scores))
        object.__setattr__(self, "valid", _frozen(valid))

    @property
    def shape(self) -> tuple:
        return self.valid.shape

    @property
    def n_classes(self) -> int:
        return self.scores.shape[2]


@dataclass(frozen=True, eq=False)
class PointScores:
    """Per-point class scores, ``(N, C)`` float64.

    A single view's back-projection yields rows summing to at most 1; a fused
    sum of ``n_views`` such arrays sums to at most ``n_views``. All-zero rows
    mark points no view could see.
    """

    scores: np.ndarray
    n_views: int = 1

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        if s.ndim != 2:
            raise ShapeMismatch(f"point scores must be (N, C), got {s.shape}")
        if s.size:
            # NaN fails the >= comparison and Inf surfaces in the row sums
            sums = s.sum(axis=1)
            if not (s.min() >= 0) or not np.isfinite(sums).all():
                raise InvalidScores("point scores must be finite and non-negative")
            if sums.max() > self.n_views + SCORE_SUM_TOL:
                raise InvalidScores(f"row sums exceed {self.n_views}")
        object.__setattr__(self, "scores", _frozen(s))

    def __len__(self):
        return self.scores.shape[0]

    @property
    def n_classes(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class SphericalConfig:
    """Range-image geometry. Field-of-view angles are positive magnitudes in radians.

    Defaults follow the Velodyne HDL-64E: 3 deg up, 25 deg down.
    """

    height: int = 64
    width: int = 2048
    fov_up: float = math.radians(3.0)
    fov_down: float = math.radians(25.0)

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError("height and width must be >= 1")
        if not self.fov_up + self.fov_down > 0:
            raise ValueError("fov_up + fov_down must be positive")

    @property
    def fov(self) -> float:
        return self.fov_up + self.fov_down

    @property
    def shape(self) -> tuple:
        return (self.height, self.width)

    @classmethod
    def from_degrees(cls, height=64, width=2048, fov_up_deg=3.0, fov_down_deg=25.0):
        return cls(height, width, math.radians(fov_up_deg), math.radians(fov_down_deg))


@dataclass(frozen=True)
class BevConfig:
    """Bird's-eye grid: columns index x, rows index y."""

    rows: int = 256
    cols: int = 256
    x_min: float = -50.0
    x_max: float = 50.0
    y_min: float = -50.0
    y_max: float = 50.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid extent must satisfy min < max on both axes")

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)


@dataclass(frozen=True)
class PostProcessConfig:
    """Soft-voting window parameters.

    ``wrap`` lets spherical windows continue across the left/right image seam;
    it has no effect on bird's-eye images.
    """

    k: int = 3
    sigma: float = 1.0
    metric: str = "manhattan"
    wrap: bool = False

    def __post_init__(self):
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError("window size k must be a positive odd integer")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")


@dataclass(frozen=True)
class ClassMap:
    """Raw SemanticKITTI ids to contiguous training ids; train id 0 is ignore."""

    raw_to_train: dict = field(default_factory=dict)
    class_names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        for raw, train in self.raw_to_train.items():
            if not 0 <= train < len(self.class_names):
                raise ValueError(f"raw id {raw} maps to train id {train} outside [0, {len(self.class_names) - 1}]")

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def train_to_raw(self) -> dict:
        # first (smallest) raw id per train id, for reporting
        inv = {}
        for raw in sorted(self.raw_to_train):
            inv.setdefault(self.raw_to_train[raw], raw)
        return inv

    def lut(self) -> np.ndarray:
        """Lookup table over all 16-bit raw ids; unknown ids map to 0."""
        table = np.zeros(1 << 16, dtype=np.int64)
        for raw, train in self.raw_to_train.items():
            table[raw] = train
        return table
