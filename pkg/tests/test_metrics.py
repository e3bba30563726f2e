import csv
import math

import numpy as np
import pytest

import oracles
from mpf.errors import AllUndefined, DomainError, LengthMismatch
from mpf.metrics import (
    ConfusionMatrix,
    DistanceBinner,
    binned_accuracy,
    confusion_matrix,
    cross_entropy,
    focal_loss,
    write_bins_csv,
    write_iou_csv,
)
from mpf.model import PointCloud, PointScores, ScoreMap


def test_accumulate_examples():
    cm = confusion_matrix([1, 1, 2], [1, 1, 2])
    assert cm.counts[1, 1] == 2 and cm.counts[2, 2] == 1 and cm.total == 3


def test_ignored_ground_truth_skipped():
    cm = confusion_matrix([5, 2], [0, 1])
    assert cm.total == 1 and cm.counts[1, 2] == 1


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        confusion_matrix([1, 2], [1])


def test_matches_naive_tally(rng):
    pred = rng.integers(0, 20, 1000)
    gt = rng.integers(0, 20, 1000)
    cm = confusion_matrix(pred, gt)
    assert cm.counts.tolist() == oracles.naive_tally(pred.tolist(), gt.tolist(), 20, 0)


def test_iou_examples():
    assert confusion_matrix([1, 2], [1, 2]).iou(1) == 1.0
    assert confusion_matrix([2, 2], [1, 1]).iou(1) == 0.0
    cm = ConfusionMatrix(3)
    cm.counts[1] = [0, 3, 2]  # tp 3, fn 2
    cm.counts[2, 1] = 1  # fp 1
    assert cm.stats(1) == (3, 1, 2) and cm.iou(1) == 0.5
    assert cm.iou(0) is None or cm.iou(0) == 0.0


def test_miou_excludes_undefined():
    cm = confusion_matrix([1, 2], [1, 3])
    # class 1 perfect, 2 and 3 have IoU 0, everything else undefined
    assert cm.miou() == pytest.approx(1 / 3)
    assert confusion_matrix([1], [1]).miou() == 1.0
    cm = confusion_matrix([1, 3], [1, 2])
    assert np.isnan(cm.per_class_iou()[4])


def test_miou_all_perfect():
    labels = np.arange(1, 20)
    assert confusion_matrix(labels, labels).miou() == 1.0


def test_miou_hand_built():
    cm = ConfusionMatrix(4)
    cm.counts[1, 1], cm.counts[1, 2] = 6, 2  # IoU(1) = 6/8
    cm.counts[2, 2], cm.counts[3, 2] = 1, 1  # IoU(2) = 1/4, IoU(3) = 0
    assert cm.miou() == pytest.approx((0.75 + 0.25 + 0.0) / 3, abs=1e-15)


def test_all_undefined():
    with pytest.raises(AllUndefined):
        confusion_matrix([3], [0]).miou()


def test_swap_symmetry(rng):
    pred, gt = rng.integers(1, 6, 500), rng.integers(1, 6, 500)
    a = confusion_matrix(pred, gt, 6, None)
    b = confusion_matrix(gt, pred, 6, None)
    np.testing.assert_array_equal(a.counts, b.counts.T)
    for c in range(6):
        assert a.iou(c) == b.iou(c)


def test_merge_equals_whole(rng):
    pred, gt = rng.integers(0, 20, 600), rng.integers(0, 20, 600)
    parts = confusion_matrix(pred[:200], gt[:200]).merge(confusion_matrix(pred[200:], gt[200:]))
    np.testing.assert_array_equal(parts.counts, confusion_matrix(pred, gt).counts)


def _ring(ranges):
    return PointCloud.from_xyz([[r, 0.0, 5.0] for r in ranges])


def test_binning_single_bin():
    bins = binned_accuracy(_ring([3, 3, 3]), [1, 1, 2], [1, 1, 1], bin_width=5)
    assert len(bins) == 1
    assert (bins[0].start, bins[0].end, bins[0].count) == (0, 5, 3)


def test_empty_bin_undefined():
    bins = binned_accuracy(_ring([1, 12]), [1, 1], [1, 1], bin_width=5)
    assert bins[1].count == 0 and bins[1].accuracy is None


def test_bin_accuracies():
    bins = binned_accuracy(_ring([1, 2, 6, 7, 8]), [1, 2, 1, 1, 1], [1, 1, 1, 1, 1], bin_width=5)
    assert [b.accuracy for b in bins] == [0.5, 1.0]


def test_bins_aggregate_to_overall(rng):
    cloud = PointCloud.from_xyz(rng.normal(scale=30, size=(2000, 3)))
    pred, gt = rng.integers(0, 4, 2000), rng.integers(0, 4, 2000)
    bins = binned_accuracy(cloud, pred, gt, 10, n_classes=4)
    overall = confusion_matrix(pred, gt, 4).accuracy()
    assert sum(b.correct for b in bins) / sum(b.count for b in bins) == pytest.approx(overall, abs=1e-15)
    assert sum(b.n_points for b in bins) == 2000


def test_binner_merge(rng):
    cloud = PointCloud.from_xyz(rng.normal(scale=30, size=(300, 3)))
    pred, gt = rng.integers(0, 4, 300), rng.integers(0, 4, 300)
    whole = DistanceBinner(10, 4).accumulate(cloud, pred, gt).bins()
    a = DistanceBinner(10, 4).accumulate(PointCloud(cloud.points[:100]), pred[:100], gt[:100])
    a.merge(DistanceBinner(10, 4).accumulate(PointCloud(cloud.points[100:]), pred[100:], gt[100:]))
    assert a.bins() == whole


def test_focal_examples():
    assert focal_loss(np.array([[0.5, 0.5]]), [0]) == pytest.approx(0.25 * math.log(2), abs=1e-15)
    assert focal_loss(np.eye(3), [0, 1, 2]) == 0.0
    assert focal_loss(np.array([[0.5, 0.5]]), [0], gamma=0) == cross_entropy(np.array([[0.5, 0.5]]), [0])


def test_cross_entropy_examples():
    assert cross_entropy(np.eye(2), [0, 1]) == 0.0
    assert cross_entropy(np.array([[math.exp(-1), 1 - math.exp(-1)]]), [0]) == pytest.approx(1.0, abs=1e-15)
    assert cross_entropy(np.full((2, 2), 0.5), [0, 1]) == pytest.approx(2 * math.log(2), abs=1e-15)


def test_focal_gamma0_equals_textbook_ce(rng):
    p = rng.dirichlet(np.ones(5), size=200)
    gt = rng.integers(0, 5, 200)
    ce = -sum(math.log(p[i, g]) for i, g in enumerate(gt))
    assert abs(focal_loss(p, gt, gamma=0) - ce) < 1e-9


def test_focal_domain_and_inputs():
    with pytest.raises(DomainError):
        focal_loss(np.array([[0.0, 1.0]]), [0])
    s = PointScores(np.array([[0.0, 1.0], [0.5, 0.5]]))
    assert focal_loss(s, [0, 1], ignore_class=0) == pytest.approx(0.25 * math.log(2))
    assert focal_loss(np.full((2, 2), 0.5), [0, 1], reduction="mean") == pytest.approx(0.25 * math.log(2))


def test_focal_on_score_map():
    sm = ScoreMap(np.full((1, 2, 2), 0.5, dtype=np.float32), np.array([[True, False]]))
    assert focal_loss(sm, np.array([[1, 0]])) == pytest.approx(0.25 * math.log(2))


def test_csv_writers(tmp_path):
    cm = confusion_matrix([1, 2, 2], [1, 2, 1])
    names = ["unlabeled"] + [f"c{i}" for i in range(1, 20)]
    write_iou_csv(tmp_path / "iou.csv", cm, names)
    rows = list(csv.DictReader(open(tmp_path / "iou.csv")))
    assert len(rows) == 19 and rows[0]["class_name"] == "c1"
    assert float(rows[0]["iou"]) == 0.5 and rows[5]["iou"] == ""
    write_bins_csv(tmp_path / "bins.csv", {"fused": binned_accuracy(_ring([1, 12]), [1, 1], [1, 2], 5)})
    rows = list(csv.DictReader(open(tmp_path / "bins.csv")))
    assert [r["bin_start"] for r in rows] == ["0", "5", "10"]
