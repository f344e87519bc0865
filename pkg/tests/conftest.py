"""Shared systems used across the test modules."""

import pytest

import radixtile as rt


def gauss_matrix(n: int):
    """Matrix of multiplication by -n+i on R^2."""
    return ((-n, -1), (1, -n))


def gauss_system(n: int, digits=None) -> rt.RadixSystem:
    if digits is None:
        digits = range(n * n + 1)
    return rt.RadixSystem(gauss_matrix(n), tuple((int(d), 0) for d in digits))


@pytest.fixture
def base10() -> rt.RadixSystem:
    return rt.RadixSystem(((10,),), tuple((d,) for d in range(10)))


@pytest.fixture
def base3_cantor() -> rt.RadixSystem:
    return rt.RadixSystem(((3,),), ((0,), (2,)))


@pytest.fixture
def base3_full() -> rt.RadixSystem:
    return rt.RadixSystem(((3,),), ((0,), (1,), (2,)))


@pytest.fixture
def twin_two() -> rt.RadixSystem:
    return rt.RadixSystem(((2, 0), (0, 2)), ((0, 0), (1, 0), (0, 1), (1, 1)))


@pytest.fixture
def m3i_048() -> rt.RadixSystem:
    return rt.RadixSystem(gauss_matrix(3), ((0, 0), (4, 0), (8, 0)))
