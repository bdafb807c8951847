import numpy as np
import pytest

from meshcone import RefineConfig, refine
from meshcone.primitives import bumpy_sphere, icosphere
from meshcone.spatial import KdIndex

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "meshcone",
        deadline=None,  # first call into a jitted kernel can take seconds
        max_examples=25,
        derandomize=True,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("meshcone")
except ImportError:  # pragma: no cover
    pass


@pytest.fixture(scope="session")
def warm_kernels():
    """Run one tiny end-to-end solve so JIT compilation never lands inside a
    timed assertion."""
    refine(icosphere(1), bumpy_sphere(1), RefineConfig(sample_count=500))
    pts = np.eye(3)
    KdIndex.build(pts).nearest_many(pts)
    return True


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
