import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpf import io
from mpf.errors import (
    BadMagic,
    DuplicateRawId,
    LengthMismatch,
    MalformedFile,
    ParseError,
    TrainIdOutOfRange,
    TruncatedFile,
    UnsupportedVersion,
)
from mpf.model import ClassMap, PointCloud, ScoreMap


def test_read_scan_order(tmp_path):
    p = tmp_path / "a.bin"
    p.write_bytes(struct.pack("<8f", 1, 0, 0, 0.5, 0, 1, 0, 0.25))
    cloud = io.read_scan(p)
    assert len(cloud) == 2
    np.testing.assert_array_equal(cloud.points, [[1, 0, 0, 0.5], [0, 1, 0, 0.25]])


def test_read_scan_truncated(tmp_path):
    p = tmp_path / "a.bin"
    p.write_bytes(b"\0" * 17)
    with pytest.raises(TruncatedFile):
        io.read_scan(p)


def test_scan_round_trip(tmp_path, rng):
    pts = rng.normal(size=(50, 4)).astype(np.float32).astype(np.float64)
    io.write_scan(tmp_path / "a.bin", PointCloud(pts))
    np.testing.assert_array_equal(io.read_scan(tmp_path / "a.bin").points, pts)


def test_label_instance_bits_dropped(tmp_path):
    p = tmp_path / "a.label"
    p.write_bytes(struct.pack("<2I", 0x00010028, 0))
    labels = io.read_labels(p, ClassMap({40: 9}, tuple(f"c{i}" for i in range(20))))
    assert list(labels.labels) == [9, 0]


def test_unknown_raw_id_is_ignore(tmp_path):
    p = tmp_path / "a.label"
    io.write_labels(p, [10, 12345, 40], instance_ids=[7, 0, 3])
    assert list(io.read_labels(p).labels) == [1, 0, 9]


def test_labels_length_mismatch(tmp_path):
    p = tmp_path / "a.label"
    io.write_labels(p, [10, 10])
    with pytest.raises(LengthMismatch):
        io.read_labels(p, cloud=PointCloud.from_xyz(np.ones((3, 3))))


def test_labels_truncated(tmp_path):
    p = tmp_path / "a.label"
    p.write_bytes(b"\0" * 6)
    with pytest.raises(TruncatedFile):
        io.read_labels(p)


@settings(max_examples=50, deadline=None)
@given(st.binary(max_size=64).map(lambda b: b[: len(b) - len(b) % 4]))
def test_label_parsing_is_total(tmp_path_factory, buf):
    p = tmp_path_factory.mktemp("lab") / "x.label"
    p.write_bytes(buf)
    labels = io.read_labels(p)
    assert len(labels) == len(buf) // 4


def test_score_file_size():
    sm = ScoreMap(np.array([[[0.25, 0.75]]], dtype=np.float32), np.array([[True]]))
    buf = io.encode_scores(sm)
    assert len(buf) == 29
    assert buf[:4] == b"MPFS"
    assert struct.unpack_from("<4I", buf, 4) == (1, 1, 1, 2)


def test_score_round_trip_bytes(tmp_path, rng):
    s = rng.random((3, 4, 5)).astype(np.float32)
    s /= s.sum(axis=2, keepdims=True)
    valid = rng.random((3, 4)) < 0.5
    io.write_scores(tmp_path / "a.mpfs", ScoreMap(s, valid))
    raw = (tmp_path / "a.mpfs").read_bytes()
    back = io.read_scores(tmp_path / "a.mpfs")
    assert io.encode_scores(back) == raw
    np.testing.assert_array_equal(back.valid, valid)


def test_score_decode_errors():
    good = io.encode_scores(ScoreMap(np.full((1, 1, 2), 0.5, dtype=np.float32), np.array([[True]])))
    with pytest.raises(BadMagic):
        io.decode_scores(b"XXXX" + good[4:])
    with pytest.raises(UnsupportedVersion):
        io.decode_scores(good[:4] + struct.pack("<I", 2) + good[8:])
    with pytest.raises(TruncatedFile):
        io.decode_scores(good[:-1])
    with pytest.raises(TruncatedFile):
        io.decode_scores(good[:10])
    with pytest.raises(MalformedFile):
        io.decode_scores(good + b"\0")


def test_class_map_lines():
    cm = io.parse_class_map("0 0 unlabeled\n10 1 car")
    assert len(cm.raw_to_train) == 2
    assert cm.class_names[1] == "car"


def test_class_map_comments_and_errors():
    cm = io.parse_class_map("# header\n0 0 unlabeled  # trailing\n\n40 9 road\n")
    assert cm.raw_to_train == {0: 0, 40: 9}
    with pytest.raises(DuplicateRawId):
        io.parse_class_map("10 1 car\n10 2 bicycle")
    with pytest.raises(TrainIdOutOfRange):
        io.parse_class_map("10 25 car", n_classes=20)
    with pytest.raises(ParseError) as e:
        io.parse_class_map("0 0 unlabeled\nten 1 car")
    assert e.value.line == 2


def test_default_class_map():
    cm = io.default_class_map()
    assert cm.n_classes == 20
    assert cm.class_names[1] == "car" and cm.class_names[19] == "traffic-sign"
    assert cm.raw_to_train[252] == 1 and cm.raw_to_train[40] == 9


def test_yaml_converter(tmp_path):
    (tmp_path / "k.yaml").write_text(
        "labels: {0: unlabeled, 10: car, 40: road, 252: moving-car}\n"
        "learning_map: {0: 0, 10: 1, 40: 2, 252: 1}\n"
        "learning_map_inv: {0: 0, 1: 10, 2: 40}\n"
    )
    cm = io.parse_class_map(io.class_map_from_yaml(tmp_path / "k.yaml"), n_classes=3)
    assert cm.raw_to_train == {0: 0, 10: 1, 40: 2, 252: 1}
    assert cm.class_names == ("unlabeled", "car", "road")
