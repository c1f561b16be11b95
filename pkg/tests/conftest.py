from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from fracbern import builtin_kernel, kernel_from_expr

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

CATALOG = ("conformable", "general", "nonconformable", "beta", "expshift", "expscaled")


def catalog_kernel(name: str):
    if name == "general":
        return builtin_kernel("general", "1+t^2")
    return builtin_kernel(name)


@pytest.fixture(scope="session")
def conformable():
    return builtin_kernel("conformable")


@pytest.fixture(scope="session")
def unit_kernel():
    return kernel_from_expr("1")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def eq1_exact(alpha: float):
    """Closed form of G y + y = y^2 with the conformable kernel, y(0.5) = -1."""
    def y(t):
        t = np.asarray(t, dtype=float)
        return 1.0 / (1.0 - 2.0 * np.exp((t**alpha - 0.5**alpha) / alpha))
    return y
