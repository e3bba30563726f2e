"""scikit-learn style wrappers around the projection / voting / fusion pipeline."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import bev, fusion, postprocess, spherical
from .metrics import confusion_matrix
from .model import BEV, IGNORE_CLASS, N_CLASSES, SPHERICAL, BevConfig, PostProcessConfig, SphericalConfig
from .segmenter import check_scores_match
from .validation import check_cloud, check_extent, check_labels, check_views


class SphericalProjector(TransformerMixin, BaseEstimator):
    """Cloud -> range image. Stateless; ``fit`` only validates the parameters."""

    def __init__(self, height=64, width=2048, fov_up_deg=3.0, fov_down_deg=25.0):
        self.height = height
        self.width = width
        self.fov_up_deg = fov_up_deg
        self.fov_down_deg = fov_down_deg

    def fit(self, X=None, y=None):
        self.config_ = SphericalConfig.from_degrees(self.height, self.width, self.fov_up_deg, self.fov_down_deg)
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return spherical.project(check_cloud(X), self.config_)


class BevProjector(TransformerMixin, BaseEstimator):
    """Cloud -> bird's-eye grid. ``extent`` is ``E`` or ``(x_min, x_max, y_min, y_max)``."""

    def __init__(self, rows=256, cols=256, extent=50.0):
        self.rows = rows
        self.cols = cols
        self.extent = extent

    def fit(self, X=None, y=None):
        self.config_ = BevConfig(self.rows, self.cols, *check_extent(self.extent))
        return self

    def transform(self, X):
        check_is_fitted(self, "config_")
        return bev.project(check_cloud(X), self.config_)


class MultiProjectionFusion(ClassifierMixin, BaseEstimator):
    """Per-point labels from spherical and bird's-eye score maps.

    Score maps come either from the ``score_maps`` argument (a dict keyed by
    view name) or from ``segmenter``, a callable ``(ProjectedImage) -> ScoreMap``.
    Nothing is learned: ``fit`` validates parameters and records ``classes_``.

    Parameters
    ----------
    views : sequence of {"spherical", "bev"}
        Views to fuse; a single view gives single-projection predictions.
    sigma_bev : float or None
        Gaussian width for the bird's-eye vote; None reuses ``sigma``.
    """

    def __init__(
        self,
        views=(SPHERICAL, BEV),
        height=64,
        width=2048,
        fov_up_deg=3.0,
        fov_down_deg=25.0,
        bev_rows=256,
        bev_cols=256,
        bev_extent=50.0,
        k=3,
        sigma=1.0,
        sigma_bev=None,
        metric="manhattan",
        wrap=False,
        n_classes=N_CLASSES,
        ignore_class=IGNORE_CLASS,
        segmenter=None,
    ):
        self.views = views
        self.height = height
        self.width = width
        self.fov_up_deg = fov_up_deg
        self.fov_down_deg = fov_down_deg
        self.bev_rows = bev_rows
        self.bev_cols = bev_cols
        self.bev_extent = bev_extent
        self.k = k
        self.sigma = sigma
        self.sigma_bev = sigma_bev
        self.metric = metric
        self.wrap = wrap
        self.n_classes = n_classes
        self.ignore_class = ignore_class
        self.segmenter = segmenter

    def fit(self, X=None, y=None):
        self.views_ = check_views(self.views)
        self.projections_ = {
            SPHERICAL: SphericalConfig.from_degrees(self.height, self.width, self.fov_up_deg, self.fov_down_deg),
            BEV: BevConfig(self.bev_rows, self.bev_cols, *check_extent(self.bev_extent)),
        }
        sigma_bev = self.sigma if self.sigma_bev is None else self.sigma_bev
        self.postprocess_ = {
            SPHERICAL: PostProcessConfig(self.k, self.sigma, self.metric, self.wrap),
            BEV: PostProcessConfig(self.k, sigma_bev, self.metric, False),
        }
        self.classes_ = np.arange(self.n_classes)
        if X is not None and y is not None:
            check_labels(y, check_cloud(X), self.n_classes)
        return self

    def project(self, X) -> dict:
        check_is_fitted(self, "projections_")
        cloud = check_cloud(X)
        mods = {SPHERICAL: spherical, BEV: bev}
        return {v: mods[v].project(cloud, self.projections_[v]) for v in self.views_}

    def view_scores(self, X, score_maps=None, images=None) -> dict:
        """Back-projected :class:`PointScores` per view."""
        check_is_fitted(self, "projections_")
        cloud = check_cloud(X)
        images = images if images is not None else self.project(cloud)
        out = {}
        for v in self.views_:
            img = images[v]
            if score_maps is not None:
                scores = score_maps[v]
            elif self.segmenter is not None:
                scores = self.segmenter(img)
            else:
                raise ValueError("no score maps given and no segmenter configured")
            check_scores_match(img, scores, self.n_classes)
            out[v] = postprocess.back_project(cloud, img, scores, self.postprocess_[v], self.projections_[v])
        return out

    def decision_function(self, X, score_maps=None, images=None) -> np.ndarray:
        """Fused ``(N, C)`` scores (sum over views)."""
        return np.asarray(self._fused(X, score_maps, images).scores)

    def _fused(self, X, score_maps=None, images=None):
        return fusion.fuse(list(self.view_scores(X, score_maps, images).values()))

    def predict(self, X, score_maps=None, images=None) -> np.ndarray:
        return np.asarray(fusion.predict(self._fused(X, score_maps, images), self.ignore_class).labels)

    def score(self, X, y, score_maps=None, sample_weight=None):
        """mIoU of the fused prediction against ``y``."""
        cloud = check_cloud(X)
        labels = check_labels(y, cloud, self.n_classes)
        pred = self.predict(cloud, score_maps)
        return confusion_matrix(pred, labels, self.n_classes, self.ignore_class).miou()
