import random

import pytest

from affdim import TransitionMatrix, validate_system

GOLDEN = ((1, 1), (1, 0))
FULL2 = ((1, 1), (1, 1))
FULL3 = ((1, 1, 1), (1, 1, 1), (1, 1, 1))

#: exercises every case tag: classical, general, non-divisible, degenerate
BATTERY = [(1, 2, 0, 0), (2, 3, 0, 0), (2, 4, 0, 1), (2, 4, 0, 0), (3, 5, 1, 2), (4, 6, 1, 3)]


def random_binary_matrix(m: int, rng: random.Random, density: float = 0.6):
    return [[1 if rng.random() < density else 0 for _ in range(m)] for _ in range(m)]


def random_irreducible(m: int, rng: random.Random, primitive: bool = False) -> TransitionMatrix:
    while True:
        mat = TransitionMatrix.from_rows(random_binary_matrix(m, rng))
        if not mat.is_irreducible():
            continue
        if primitive and not mat.is_primitive():
            continue
        return mat


@pytest.fixture(scope="session")
def golden():
    return TransitionMatrix.from_rows(GOLDEN)


@pytest.fixture(scope="session")
def full2():
    return TransitionMatrix.from_rows(FULL2)


@pytest.fixture(scope="session")
def random3():
    return random_irreducible(3, random.Random(20240601), primitive=True)


def sys_golden(p, q, a, b):
    return validate_system(p, q, a, b, GOLDEN)


def sys_full(p, q, a, b):
    return validate_system(p, q, a, b, FULL2)
