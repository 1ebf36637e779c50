from fractions import Fraction

import pytest

from subbary.services.convex_body import ConvexBodyKernel
from subbary.services.eckardt import QUADRILATERAL
from subbary.services.invariants import InvariantCalculator
from subbary.services.profile_engine import ProfileEngine


@pytest.fixture(scope="session")
def kernel():
    return ConvexBodyKernel()


@pytest.fixture(scope="session")
def engine(kernel):
    return ProfileEngine(kernel)


@pytest.fixture(scope="session")
def calculator(kernel):
    return InvariantCalculator(kernel)


@pytest.fixture(scope="session")
def unit_square(kernel):
    return kernel.build([(0, 0), (1, 0), (0, 1), (1, 1)], 2)


@pytest.fixture(scope="session")
def triangle(kernel):
    return kernel.build([(0, 0), (1, 0), (0, 1)], 2)


@pytest.fixture(scope="session")
def cube(kernel):
    corners = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    return kernel.build(corners, 3)


@pytest.fixture(scope="session")
def simplex3(kernel):
    return kernel.build([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)


@pytest.fixture(scope="session")
def eckardt_body(kernel):
    return kernel.build(QUADRILATERAL, 2)

