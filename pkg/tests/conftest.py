import pytest
from hypothesis import settings

from fuzzymetric.metric_core import EuclideanRm, PointCloud, RealLine

settings.register_profile("fuzzymetric", max_examples=60, deadline=None)
settings.load_profile("fuzzymetric")


@pytest.fixture
def real_line():
    return RealLine()


@pytest.fixture
def plane():
    return EuclideanRm(dimension=2)


@pytest.fixture
def cloud():
    # Four points on a path a - b - c - d with unit steps
    return PointCloud(
        labels=("a", "b", "c", "d"),
        table=(
            (0.0, 1.0, 2.0, 3.0),
            (1.0, 0.0, 1.0, 2.0),
            (2.0, 1.0, 0.0, 1.0),
            (3.0, 2.0, 1.0, 0.0),
        ),
    )
