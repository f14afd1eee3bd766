from fractions import Fraction

import pytest

from app.exactnum.cyclotomic import CyclotomicField
from app.twistalg.weights import AffineWeight


@pytest.fixture
def field2():
    return CyclotomicField.get(2)


@pytest.fixture
def field3():
    return CyclotomicField.get(3)


@pytest.fixture
def generic_weight():
    """N = 2, k = 1 weight with mu(H) = 1/3; every Verma module of it is irreducible."""
    return AffineWeight.from_h_values([Fraction(1, 3)], 1)


@pytest.fixture
def dominant_weight():
    """N = 2, k = 1 weight with mu(H) = 1/2, dominant integral at node 0."""
    return AffineWeight.from_h_values([Fraction(1, 2)], 1)


@pytest.fixture
def no_config(tmp_path):
    return str(tmp_path / "missing.yml")
