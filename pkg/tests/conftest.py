from importlib import resources

import pytest

from fermat_curves import curve
from fermat_curves.forms import BinaryForm


def fixture_path(name: str):
    return resources.files("fermat_curves") / "data" / name


@pytest.fixture(scope="session")
def degree8():
    return curve.load(fixture_path("degree8.curve"))


@pytest.fixture(scope="session")
def degree9():
    return curve.load(fixture_path("degree9.curve"))


@pytest.fixture(scope="session")
def line():
    S = BinaryForm.monomial(1, 0)
    T = BinaryForm.monomial(0, 1)
    Z = BinaryForm.zero(1)
    return curve.validate([S, S, T, T, Z, Z])
