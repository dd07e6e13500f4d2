import numpy as np
import pytest

from dipolesim.coupling import AtomGeometry, coupling_matrix
from dipolesim.dynamics import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_integrator():
    # JIT-compile the propagation kernel once so timed tests measure physics,
    # not compilation
    warm_up()


@pytest.fixture(scope="session")
def pair_s02_perp():
    """Two atoms, s = 0.2 wavelengths, dipoles perpendicular to the axis."""
    return AtomGeometry(n_atoms=2, spacing_s=0.2, alpha=np.pi / 2)


@pytest.fixture(scope="session")
def pair_s02_perp_couplings(pair_s02_perp):
    return coupling_matrix(pair_s02_perp)


@pytest.fixture(scope="session")
def chain3_s02_perp():
    """Three atoms, s = 0.2 wavelengths, dipoles perpendicular."""
    return AtomGeometry(n_atoms=3, spacing_s=0.2, alpha=np.pi / 2)


@pytest.fixture(scope="session")
def chain3_s02_perp_couplings(chain3_s02_perp):
    return coupling_matrix(chain3_s02_perp)
