import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import sampdisc as sd


@pytest.fixture(scope="session")
def trig3():
    """Real span of frequencies {-1, 0, 1} on a 64-point torus grid."""
    return sd.build_trig_subspace(sd.FrequencySet.box(1),
                                  sd.GriddedSpace.torus(1, 64))


@pytest.fixture(scope="session")
def trig5_256():
    return sd.build_trig_subspace(sd.FrequencySet.box(2),
                                  sd.GriddedSpace.torus(1, 256))


@pytest.fixture(scope="session")
def poly3():
    """Quadratic polynomials on a 256-point midpoint grid over [-1, 1]."""
    return sd.build_poly_subspace(sd.GriddedSpace.box(1, 256), 2)


@pytest.fixture(scope="session")
def poly5_512():
    return sd.build_poly_subspace(sd.GriddedSpace.box(1, 512), 4)


def random_rotation(n, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
