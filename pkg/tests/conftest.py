import numpy as np
import pytest

from loewnerkit.dataset import FrequencyDataset, generate_synthetic
from loewnerkit.models import BarycentricModel


def first_order(points):
    """Samples of 1/(s+1)."""
    points = np.asarray(points, dtype=complex)
    return FrequencyDataset(points, 1.0 / (points + 1.0))


def random_bary(rng, k, m=1, p=1, scale=1.0):
    """Strictly proper barycentric model with nodes on the imaginary axis."""
    nodes = 1j * np.sort(rng.uniform(0.5, 10.0, k)) + rng.uniform(-0.1, 0.1, k)
    values = rng.standard_normal((k, p, m)) + 1j * rng.standard_normal((k, p, m))
    weights = scale * (rng.standard_normal((k, m, m)) + 1j * rng.standard_normal((k, m, m)))
    return BarycentricModel(nodes, values, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def siso6():
    d, model = generate_synthetic(6, 1, 1, np.logspace(-1, 1.3, 60), seed=11)
    return d, model


def match_gap(a, b):
    """Largest distance in an optimal one-to-one matching of two point sets."""
    from scipy.optimize import linear_sum_assignment

    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max()) if a.size else 0.0
