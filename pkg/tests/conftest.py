import pytest

from approxsym import presets
from approxsym.detsolve import PerturbedPDE, algebra_basis


@pytest.fixture(scope="session")
def pde():
    return PerturbedPDE.harry_dym()


@pytest.fixture(scope="session")
def exact():
    return presets.exact_basis("harry-dym")


@pytest.fixture(scope="session")
def basis(exact):
    return algebra_basis(exact).fields


@pytest.fixture(scope="session")
def algebra():
    return presets.algebra("harry-dym")


@pytest.fixture(scope="session")
def adjoints():
    return presets.adjoints("harry-dym")
