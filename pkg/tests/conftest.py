import pytest

from ultrawave import GroupDescriptor, haar_shannon_system

BASIC_CONFIGS = [
    ("qp", 2, 1, None),
    ("qp", 3, 1, None),
    ("qp", 3, 2, None),
    ("fpt", 2, 1, None),
    ("fpt", 3, 1, None),
    ("qpquad", 3, 1, 2),
]


def make_group(kind, p, r0, u):
    return GroupDescriptor(kind, p, r0=r0, u=u)


@pytest.fixture(scope="session")
def basic_groups():
    return {cfg: make_group(*cfg) for cfg in BASIC_CONFIGS}


@pytest.fixture(scope="session")
def haar_systems(basic_groups):
    return {cfg: haar_shannon_system(g) for cfg, g in basic_groups.items()}
