import math

import pytest

from spheroconal.asymmetry import e1_from_modulus, from_e1

# The four dimensionless fixtures used throughout: three generic asymmetries
# and the most asymmetric configuration e = (sqrt(3)/2, 0, -sqrt(3)/2).
E1_VALUES = (0.55, 0.75, math.sqrt(3.0) / 2.0, 0.95)
MODULI = (0.3, 0.5, 0.7)


@pytest.fixture(scope="session")
def mid_config():
    """Most asymmetric configuration, k1sq = k2sq = 1/2."""
    return from_e1(math.sqrt(3.0) / 2.0)


@pytest.fixture(scope="session", params=MODULI, ids=lambda k: f"k1sq={k}")
def modulus_config(request):
    """(k1sq, configuration) pairs pinned at round first-side parameters."""
    return request.param, from_e1(e1_from_modulus(request.param))
