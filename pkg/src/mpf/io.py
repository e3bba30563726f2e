"""Readers and writers for SemanticKITTI scans/labels, MPFS score maps and class maps."""
from __future__ import annotations

import os
import struct
from importlib import resources

import numpy as np

from .errors import (
    BadMagic,
    DuplicateRawId,
    LengthMismatch,
    MalformedFile,
    ParseError,
    TrainIdOutOfRange,
    TruncatedFile,
    UnsupportedVersion,
)
from .model import N_CLASSES, ClassMap, LabelVector, PointCloud, ScoreMap

MAGIC = b"MPFS"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")

_SCAN_DTYPE = np.dtype("<f4")
_LABEL_DTYPE = np.dtype("<u4")


def _read_bytes(path) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def read_scan(path) -> PointCloud:
    """Read a velodyne ``.bin`` file of little-endian float32 ``x, y, z, rem`` quadruples."""
    buf = _read_bytes(path)
    if len(buf) % 16:
        raise TruncatedFile(f"{path}: {len(buf)} bytes is not a multiple of 16")
    return PointCloud(np.frombuffer(buf, dtype=_SCAN_DTYPE).reshape(-1, 4))


def write_scan(path, cloud: PointCloud) -> None:
    with open(path, "wb") as f:
        f.write(np.ascontiguousarray(cloud.points, dtype=_SCAN_DTYPE).tobytes())


def read_raw_labels(path) -> np.ndarray:
    """Raw semantic ids (lower 16 bits of each word); instance ids are dropped."""
    buf = _read_bytes(path)
    if len(buf) % 4:
        raise TruncatedFile(f"{path}: {len(buf)} bytes is not a multiple of 4")
    words = np.frombuffer(buf, dtype=_LABEL_DTYPE)
    return (words & 0xFFFF).astype(np.int64)


def read_labels(path, class_map: ClassMap | None = None, cloud: PointCloud | None = None) -> LabelVector:
    """Read a ``.label`` file and remap raw ids to training ids.

    Raw ids missing from the map become 0. When ``cloud`` is given the label
    count must match its point count.
    """
    class_map = class_map or default_class_map()
    raw = read_raw_labels(path)
    if cloud is not None and len(raw) != len(cloud):
        raise LengthMismatch(f"{path}: {len(raw)} labels for a cloud of {len(cloud)} points")
    return LabelVector(class_map.lut()[raw], class_map.n_classes)


def write_labels(path, raw_ids, instance_ids=None) -> None:
    """Write raw semantic ids (and optional instance ids) in ``.label`` layout."""
    raw_ids = np.asarray(raw_ids, dtype=np.uint32) & 0xFFFF
    inst = 0 if instance_ids is None else (np.asarray(instance_ids, dtype=np.uint32) & 0xFFFF) << 16
    with open(path, "wb") as f:
        f.write((raw_ids | inst).astype(_LABEL_DTYPE).tobytes())


def encode_scores(score_map: ScoreMap) -> bytes:
    h, w, c = score_map.scores.shape
    return b"".join([
        _HEADER.pack(MAGIC, VERSION, h, w, c),
        score_map.valid.astype(np.uint8).tobytes(),
        np.ascontiguousarray(score_map.scores, dtype="<f4").tobytes(),
    ])


def decode_scores(buf: bytes, name="<bytes>") -> ScoreMap:
    if len(buf) < 4:
        raise TruncatedFile(f"{name}: missing header")
    if buf[:4] != MAGIC:
        raise BadMagic(f"{name}: magic {buf[:4]!r} is not {MAGIC!r}")
    if len(buf) < 8:
        raise TruncatedFile(f"{name}: missing header")
    version = struct.unpack_from("<I", buf, 4)[0]
    if version != VERSION:
        raise UnsupportedVersion(f"{name}: version {version}")
    if len(buf) < _HEADER.size:
        raise TruncatedFile(f"{name}: missing header")
    _, _, h, w, c = _HEADER.unpack_from(buf)
    n_mask = h * w
    expected = _HEADER.size + n_mask + 4 * n_mask * c
    if len(buf) < expected:
        raise TruncatedFile(f"{name}: {len(buf)} bytes, expected {expected}")
    if len(buf) > expected:
        raise MalformedFile(f"{name}: {len(buf) - expected} trailing bytes")
    mask = np.frombuffer(buf, dtype=np.uint8, count=n_mask, offset=_HEADER.size)
    if mask.size and mask.max() > 1:
        raise MalformedFile(f"{name}: mask bytes must be 0 or 1")
    scores = np.frombuffer(buf, dtype="<f4", count=n_mask * c, offset=_HEADER.size + n_mask)
    return ScoreMap(scores.reshape(h, w, c), mask.reshape(h, w).astype(bool))


def write_scores(path, score_map: ScoreMap) -> None:
    with open(path, "wb") as f:
        f.write(encode_scores(score_map))


def read_scores(path) -> ScoreMap:
    return decode_scores(_read_bytes(path), name=os.fspath(path))


def parse_class_map(text: str, n_classes: int = N_CLASSES) -> ClassMap:
    """Parse ``<raw_id> <train_id> <name>`` lines; ``#`` starts a comment.

    The name on the first line declaring a train id becomes that class's name.
    """
    raw_to_train = {}
    names = [None] * n_classes
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise ParseError(lineno, "expected '<raw_id> <train_id> <name>'")
        try:
            raw, train = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, "ids must be integers") from None
        if not 0 <= raw < 1 << 16:
            raise ParseError(lineno, f"raw id {raw} is not a 16-bit value")
        if raw in raw_to_train:
            raise DuplicateRawId(f"line {lineno}: raw id {raw} already mapped")
        if not 0 <= train < n_classes:
            raise TrainIdOutOfRange(f"line {lineno}: train id {train} not in [0, {n_classes - 1}]")
        raw_to_train[raw] = train
        if names[train] is None:
            names[train] = parts[2].strip()
    if names[0] is None:
        names[0] = "unlabeled"
    names = [n if n is not None else f"class_{i}" for i, n in enumerate(names)]
    return ClassMap(raw_to_train, tuple(names))


def load_class_map(path, n_classes: int = N_CLASSES) -> ClassMap:
    with open(path, encoding="utf-8") as f:
        return parse_class_map(f.read(), n_classes)


def default_class_map() -> ClassMap:
    text = resources.files("mpf").joinpath("data/semantic_kitti.txt").read_text(encoding="utf-8")
    return parse_class_map(text)


def class_map_from_yaml(path) -> str:
    """Convert the dataset's ``semantic-kitti.yaml`` into the line format.

    Uses its ``learning_map`` and ``learning_map_inv``/``labels`` sections.
    """
    import yaml

    with open(path, encoding="utf-8") as f:
        cfg = yaml.safe_load(f)
    learning_map = {int(k): int(v) for k, v in cfg["learning_map"].items()}
    inv = {int(k): int(v) for k, v in cfg.get("learning_map_inv", {}).items()}
    labels = {int(k): str(v) for k, v in cfg.get("labels", {}).items()}
    lines = ["# <raw_id> <train_id> <train_class_name>"]
    for raw in sorted(learning_map):
        train = learning_map[raw]
        name = labels.get(inv.get(train, raw), f"class_{train}")
        lines.append(f"{raw} {train} {name.replace(' ', '-')}")
    return "\n".join(lines) + "\n"
