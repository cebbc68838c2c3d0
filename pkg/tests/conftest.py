import numpy as np
import pytest


def rotation_matrix(axis, angle):
    """Rodrigues rotation about the (not necessarily unit) axis."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def random_rotation(rng):
    axis = rng.standard_normal(3)
    return rotation_matrix(axis, rng.uniform(0.0, 2.0 * np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
