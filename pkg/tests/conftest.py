import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mpf.model import PointCloud, ScoreMap  # noqa: E402


def random_cloud(rng, n, spread=30.0, collide=0.3):
    """Cloud with deliberate duplicates so pixels and cells collide."""
    xyz = rng.normal(scale=spread, size=(n, 3))
    xyz[:, 2] *= 0.1
    if n > 1:
        k = int(collide * n)
        src = rng.integers(0, n, size=k)
        dst = rng.integers(0, n, size=k)
        xyz[dst] = xyz[src] * rng.choice([1.0, 1.0 + 1e-4], size=(k, 1))
    rem = rng.random(n)
    return PointCloud(np.column_stack([xyz, rem]))


def random_scores(rng, img, n_classes=5):
    s = rng.random(img.shape + (n_classes,)) + 1e-3
    s = (s / s.sum(axis=2, keepdims=True)).astype(np.float32)
    s /= s.sum(axis=2, keepdims=True)
    return ScoreMap(s, img.valid)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
