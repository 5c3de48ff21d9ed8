import numpy as np
import pytest

from gms.core import PointCloud, SolverConfig, ZetaSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ms_spec():
    return ZetaSpec("ms_arctan")


@pytest.fixture
def tv_spec():
    return ZetaSpec("tv_smoothed", delta=0.001)


@pytest.fixture
def quad_spec():
    return ZetaSpec("quadratic")


def random_cloud(rng, n, d=2, labeled=False):
    pts = rng.random((n, d))
    labels = rng.random(n) if labeled else None
    return PointCloud(points=pts, labels=labels)


def small_config(**overrides):
    defaults = dict(lam=2.0, eps=0.1, sigma=1.0, k_max=8)
    defaults.update(overrides)
    return SolverConfig(**defaults)
