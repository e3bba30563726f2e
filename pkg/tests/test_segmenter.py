import numpy as np
import pytest

from conftest import random_cloud
from mpf import bev, io, spherical
from mpf.errors import LengthMismatch, MaskMismatch, ShapeMismatch
from mpf.model import LabelVector, PointCloud, ScoreMap, SphericalConfig
from mpf.segmenter import OracleSegmenter, check_scores_match, external_segment, oracle_segment


@pytest.fixture
def two_points():
    cloud = PointCloud.from_xyz([[5.0, 0, 0], [0, 5.0, 0]])
    return cloud, LabelVector([5, 3])


def test_one_hot_and_uniform(two_points):
    cloud, labels = two_points
    img = spherical.project(cloud)
    s = oracle_segment(img, labels)
    r, c = np.argwhere(img.source_index == 0)[0]
    expected = np.zeros(20, dtype=np.float32)
    expected[5] = 1.0
    np.testing.assert_array_equal(s.scores[r, c], expected)
    np.testing.assert_array_equal(s.scores[0, 0], np.full(20, 0.05, dtype=np.float32))


def test_smoothing(two_points):
    cloud, labels = two_points
    img = spherical.project(cloud)
    s = oracle_segment(img, labels, smoothing=0.19)
    r, c = np.argwhere(img.source_index == 1)[0]
    assert np.isclose(s.scores[r, c, 3], 0.81)
    assert np.allclose(np.delete(s.scores[r, c], 3), 0.01)


def test_label_count_must_cover_image(two_points):
    cloud, _ = two_points
    with pytest.raises(LengthMismatch):
        oracle_segment(spherical.project(cloud), LabelVector([1]))


def test_argmax_reproduces_labels(rng):
    cloud = random_cloud(rng, 3000)
    labels = LabelVector(rng.integers(0, 20, len(cloud)))
    for eps in (0.0, 0.5, 0.9):
        img = bev.project(cloud)
        s = OracleSegmenter(labels, eps)(img)
        got = s.scores[img.valid].argmax(axis=1)
        np.testing.assert_array_equal(got, labels.labels[img.source_index[img.valid]])


def test_external_round_trip(tmp_path, two_points):
    cloud, labels = two_points
    img = spherical.project(cloud)
    s = oracle_segment(img, labels)
    io.write_scores(tmp_path / "s.mpfs", s)
    back = external_segment(img, tmp_path / "s.mpfs", 20)
    assert back.scores.tobytes() == s.scores.tobytes()


def test_external_shape_mismatch(tmp_path, two_points):
    cloud, labels = two_points
    small = oracle_segment(spherical.project(cloud, SphericalConfig(32, 2048)), labels)
    io.write_scores(tmp_path / "s.mpfs", small)
    with pytest.raises(ShapeMismatch):
        external_segment(spherical.project(cloud), tmp_path / "s.mpfs")


def test_external_mask_mismatch(tmp_path, two_points):
    cloud, labels = two_points
    img = spherical.project(cloud)
    s = oracle_segment(img, labels)
    valid = img.valid.copy()
    valid[0, 0] = True
    io.write_scores(tmp_path / "s.mpfs", ScoreMap(s.scores, valid))
    with pytest.raises(MaskMismatch, match=r"\(0, 0\)"):
        external_segment(img, tmp_path / "s.mpfs")


def test_class_count_checked(two_points):
    cloud, labels = two_points
    img = spherical.project(cloud)
    with pytest.raises(ShapeMismatch):
        check_scores_match(img, oracle_segment(img, labels), n_classes=19)
