"""Shared builders for the test suite."""

import numpy as np
import pytest

from nmf2 import AngularForm


def angular_rank2(rng, m, n, band=None, weights=(0.2, 2.0)):
    """Random nonnegative rank-2 matrix built from the angular form with all
    angles inside a feasible band, returned with its generating form."""
    if band is None:
        theta1 = rng.uniform(0.25, np.pi / 2 - 0.25)
        theta2 = rng.uniform(0.25, np.pi / 2 - 0.25)
    else:
        theta1, theta2 = band
    margin = 0.02
    psi = rng.uniform(theta1 - np.pi / 2 + margin, theta2 - margin, m)
    phi = rng.uniform(theta2 - np.pi / 2 + margin, theta1 - margin, n)
    form = AngularForm(
        psi=psi,
        phi=phi,
        d_u=rng.uniform(*weights, m),
        d_v=rng.uniform(*weights, n),
    )
    return form.reconstruct(), form


def noisy_rank2(rng, m, n, scale=0.2):
    """Nonnegative matrix whose rank-2 truncation is usually not nonnegative:
    a boundary-ish rank-2 base plus folded-normal noise."""
    psi = rng.uniform(0.0, np.pi / 2 - 1e-6, m)
    phi = rng.uniform(0.0, np.pi / 2 - 1e-6, n)
    psi[: max(1, m // 3)] = np.pi / 2 - 1e-7
    phi[: max(1, n // 3)] = 1e-7
    base = AngularForm(
        psi=psi, phi=phi, d_u=rng.uniform(0.3, 1.0, m), d_v=rng.uniform(0.3, 1.0, n)
    ).reconstruct()
    return base + np.abs(rng.normal(0.0, scale * base.mean(), (m, n)))


@pytest.fixture
def worked_example():
    """The symmetric 4x4 matrix with eigenvalues 7 and 2 used as a golden
    instance throughout."""
    left = np.array(
        [
            [4 / np.sqrt(50), 0.5],
            [3 / np.sqrt(50), 0.5],
            [3 / np.sqrt(50), -0.5],
            [4 / np.sqrt(50), -0.5],
        ]
    )
    mid = np.array([[6.0, 2.0], [2.0, 3.0]])
    return left @ mid @ left.T
