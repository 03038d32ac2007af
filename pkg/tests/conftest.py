import random

import pytest

from ghcrypt.cyclic import keygen_cyclic
from ghcrypt.freeprod import FactorFamily
from ghcrypt.general import keygen_general
from ghcrypt.groupcore import cyclic_group, sym


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def key35():
    """Unrandomized fixture key: m=3, n=35, R=(1, 17, 9)."""
    return keygen_cyclic(3, 4, random.Random(1), primes=(7, 5), base=17,
                         randomize_transversal=False)


@pytest.fixture(scope="session")
def key77():
    """Unrandomized fixture key: m=2, n=77, R=(1, 6)."""
    return keygen_cyclic(2, 4, random.Random(2), primes=(7, 11), base=6,
                         randomize_transversal=False)


@pytest.fixture(scope="session")
def small_family(key35, key77):
    """Two-factor family (orders 3 and 2) with trapdoors attached."""
    (pk1, sk1), (pk2, sk2) = key35, key77
    return FactorFamily((pk1, pk2), (sk1, sk2))


@pytest.fixture(scope="session")
def sym3_keys():
    return keygen_general(sym(3), 16, random.Random(33))


@pytest.fixture(scope="session")
def z6_keys():
    return keygen_general(cyclic_group(6), 16, random.Random(66))
