"""Multi-projection fusion for LiDAR point-cloud semantic segmentation.

Spherical and bird's-eye projections, Gaussian soft-voting back-projection,
score fusion and evaluation. Neural inference is pluggable: score maps come
from MPFS files or from an oracle built from ground truth.
"""
from .bev import project as project_bev
from .estimators import BevProjector, MultiProjectionFusion, SphericalProjector
from .fusion import fuse, predict
from .metrics import ConfusionMatrix, binned_accuracy, cross_entropy, focal_loss
from .model import (
    BevConfig,
    ClassMap,
    LabelVector,
    PointCloud,
    PointScores,
    PostProcessConfig,
    ProjectedImage,
    ScoreMap,
    SphericalConfig,
    validate,
)
from .postprocess import back_project
from .segmenter import OracleSegmenter, external_segment, oracle_segment
from .spherical import project as project_spherical

__version__ = "0.1.0"

__all__ = [
    "BevConfig", "BevProjector", "ClassMap", "ConfusionMatrix", "LabelVector",
    "MultiProjectionFusion", "OracleSegmenter", "PointCloud", "PointScores",
    "PostProcessConfig", "ProjectedImage", "ScoreMap", "SphericalConfig",
    "SphericalProjector", "back_project", "binned_accuracy", "cross_entropy",
    "external_segment", "focal_loss", "fuse", "oracle_segment", "predict",
    "project_bev", "project_spherical", "validate",
]
